# ---
# entity_id: module-optim-adam
# entity_name: Adam Parameter Groups
# entity_type_id: module
# entity_path: splat_slam/optim/adam.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-26T09:30:00Z
# entity_exports: [OptimizerState, step, GaussianOptimizer, PoseOptimizer, ExposureOptimizer]
# entity_dependencies: [numpy]
# entity_callers: [tracker, mapper, funnel]
# entity_callees: [exp_se3]
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
First-order moment optimizer with per-group learning rates.

Provides:
- OptimizerState / step: bias-corrected Adam over named parameter groups
- GaussianOptimizer: the five Gaussian groups, kept aligned with the map
  across insertion and pruning
- PoseOptimizer: twist step retracted as T <- Exp(-delta) o T
- ExposureOptimizer: the (a, b) brightness pair
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from splat_slam.errors import ShapeMismatch
from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.lie import SE3Pose, exp_se3
from splat_slam.rendering.backward import GradientBuffers
from splat_slam.settings import OptimizerSettings
from splat_slam.slam.frame import Exposure

FloatArray = NDArray[np.float64]

GAUSSIAN_GROUPS = ("mean_w", "log_scale", "rotation_q", "opacity_logit", "colour_logit")


@dataclass
class OptimizerState:
    """Moments, step counter and learning rates of one optimisation loop."""

    learning_rates: dict[str, float | FloatArray]
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    first_moment: dict[str, FloatArray] = field(default_factory=dict)
    second_moment: dict[str, FloatArray] = field(default_factory=dict)

    @classmethod
    def from_settings(
        cls, learning_rates: dict[str, float | FloatArray], settings: OptimizerSettings
    ) -> OptimizerState:
        return cls(
            learning_rates=learning_rates,
            beta1=settings.beta1,
            beta2=settings.beta2,
            eps=settings.eps,
        )


def adam_deltas(state: OptimizerState, grads: dict[str, FloatArray]) -> dict[str, FloatArray]:
    """Advance the moments by one step and return lr * m_hat / (sqrt(v_hat) + eps) per group."""
    state.step_count += 1
    t = state.step_count
    deltas: dict[str, FloatArray] = {}
    for name, grad in grads.items():
        m = state.first_moment.get(name)
        v = state.second_moment.get(name)
        if m is None or v is None:
            m = np.zeros_like(grad)
            v = np.zeros_like(grad)
        elif m.shape != grad.shape:
            raise ShapeMismatch(name, m.shape, grad.shape)
        m = state.beta1 * m + (1.0 - state.beta1) * grad
        v = state.beta2 * v + (1.0 - state.beta2) * grad * grad
        state.first_moment[name] = m
        state.second_moment[name] = v
        m_hat = m / (1.0 - state.beta1**t)
        v_hat = v / (1.0 - state.beta2**t)
        deltas[name] = state.learning_rates[name] * m_hat / (np.sqrt(v_hat) + state.eps)
    return deltas


def step(
    state: OptimizerState, params: dict[str, FloatArray], grads: dict[str, FloatArray]
) -> dict[str, FloatArray]:
    """One Adam step; returns updated copies of the parameters.

    Raises:
        ShapeMismatch: a gradient does not match its parameter or stored moments.
    """
    for name, grad in grads.items():
        if params[name].shape != grad.shape:
            raise ShapeMismatch(name, params[name].shape, grad.shape)
    deltas = adam_deltas(state, grads)
    return {name: params[name] - deltas.get(name, 0.0) for name in params}


class GaussianOptimizer:
    """Adam over the Gaussian parameter groups of one map."""

    def __init__(self, settings: OptimizerSettings, monocular: bool = False):
        position_lr = settings.lr_position * (
            settings.monocular_position_factor if monocular else 1.0
        )
        self.state = OptimizerState.from_settings(
            {
                "mean_w": position_lr,
                "log_scale": settings.lr_scale,
                "rotation_q": settings.lr_quaternion,
                "opacity_logit": settings.lr_opacity,
                "colour_logit": settings.lr_colour,
            },
            settings,
        )
        self._ids = np.zeros(0, dtype=np.int64)

    def sync(self, gaussian_map: GaussianMap) -> None:
        """Drop moments of removed Gaussians and start new ones at zero."""
        ids = gaussian_map.creation_order
        if np.array_equal(ids, self._ids):
            return
        kept = np.isin(self._ids, ids)
        fresh = ~np.isin(ids, self._ids)
        for moments in (self.state.first_moment, self.state.second_moment):
            for name in list(moments):
                old = moments[name][kept]
                new = np.zeros((int(np.count_nonzero(fresh)),) + old.shape[1:])
                merged = np.empty((ids.shape[0],) + old.shape[1:])
                merged[~fresh] = old
                merged[fresh] = new
                moments[name] = merged
        self._ids = ids.copy()

    def step(self, gaussian_map: GaussianMap, grads: GradientBuffers) -> None:
        """Update the map in place, then renormalise quaternions and clamp scales."""
        self.sync(gaussian_map)
        params = {name: getattr(gaussian_map, name) for name in GAUSSIAN_GROUPS}
        updated = step(self.state, params, grads.gaussian_groups())
        for name in GAUSSIAN_GROUPS:
            setattr(gaussian_map, name, updated[name])
        gaussian_map.constrain()


class PoseOptimizer:
    """Adam on the 6-vector twist with translation and rotation rates."""

    def __init__(self, settings: OptimizerSettings):
        rates = np.array([settings.lr_translation] * 3 + [settings.lr_rotation] * 3)
        self.state = OptimizerState.from_settings({"twist": rates}, settings)

    def step(self, pose: SE3Pose, d_twist: FloatArray) -> tuple[SE3Pose, float]:
        """Return the retracted pose and the Euclidean norm of the applied step."""
        if d_twist.shape != (6,):
            raise ShapeMismatch("twist", (6,), d_twist.shape)
        delta = adam_deltas(self.state, {"twist": d_twist})["twist"]
        return exp_se3(-delta) @ pose, float(np.linalg.norm(delta))


class ExposureOptimizer:
    def __init__(self, settings: OptimizerSettings):
        self.state = OptimizerState.from_settings({"exposure": settings.lr_exposure}, settings)

    def step(self, exposure: Exposure, d_exposure: FloatArray) -> Exposure:
        delta = adam_deltas(self.state, {"exposure": d_exposure})["exposure"]
        return Exposure(exposure.a - float(delta[0]), exposure.b - float(delta[1]))
