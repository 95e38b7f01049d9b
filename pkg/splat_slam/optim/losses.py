# ---
# entity_id: module-optim-losses
# entity_name: SLAM Losses
# entity_type_id: module
# entity_path: splat_slam/optim/losses.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-26T09:00:00Z
# entity_exports: [LossWeights, LossResult, photometric_loss, geometric_loss, isotropic_loss]
# entity_dependencies: [numpy, pydantic]
# entity_callers: [tracker, mapper]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
Photometric, geometric and isotropic losses with their gradients.

Image losses are means over the selected pixels; the L1 derivative uses
sign(x) * min(1, |x| / delta) so an exact match has zero gradient.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from splat_slam.errors import EmptyMask

FloatArray = NDArray[np.float64]

L1_SMOOTHING = 1e-6


class LossWeights(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_pho: float = Field(default=0.9, ge=0.0, le=1.0)
    lambda_iso: float = Field(default=10.0, ge=0.0)


class LossResult(NamedTuple):
    value: float
    grad: FloatArray


def smoothed_sign(x: FloatArray, delta: float = L1_SMOOTHING) -> FloatArray:
    return np.sign(x) * np.minimum(1.0, np.abs(x) / delta)


def _masked_l1(
    rendered: FloatArray, observed: FloatArray, mask: NDArray[np.bool_], delta: float
) -> LossResult:
    if rendered.shape != observed.shape:
        raise ValueError(f"shape mismatch {rendered.shape} vs {observed.shape}")
    selected = int(np.count_nonzero(mask))
    if selected == 0:
        raise EmptyMask("loss mask selects no pixels")
    channels = 1 if rendered.ndim == 2 else rendered.shape[2]
    pixel_mask = mask if rendered.ndim == 2 else mask[:, :, None]
    residual = rendered - observed
    denominator = selected * channels
    value = float(np.mean(np.abs(residual[mask])))
    grad = np.where(pixel_mask, smoothed_sign(residual, delta), 0.0) / denominator
    return LossResult(value, grad)


def photometric_loss(
    rendered: FloatArray,
    observed: FloatArray,
    mask: NDArray[np.bool_],
    delta: float = L1_SMOOTHING,
) -> LossResult:
    """Mean |rendered - observed| over masked pixels and all channels."""
    return _masked_l1(rendered, observed, mask, delta)


def geometric_loss(
    rendered_depth: FloatArray,
    observed_depth: FloatArray,
    mask: NDArray[np.bool_],
    delta: float = L1_SMOOTHING,
) -> LossResult:
    """Mean |D - D_obs| over masked pixels."""
    return _masked_l1(rendered_depth, observed_depth, mask, delta)


def isotropic_loss(log_scale: FloatArray) -> LossResult:
    """(1/N) sum_i || s_i - mean(s_i) ||_1 on activated scales s = exp(log_scale).

    The gradient is taken with respect to log_scale.
    """
    n = log_scale.shape[0]
    if n == 0:
        return LossResult(0.0, np.zeros_like(log_scale))
    scale = np.exp(log_scale)
    residual = scale - scale.mean(axis=1, keepdims=True)
    value = float(np.sum(np.abs(residual))) / n
    signs = np.sign(residual)
    d_scale = (signs - signs.mean(axis=1, keepdims=True)) / n
    return LossResult(value, d_scale * scale)
