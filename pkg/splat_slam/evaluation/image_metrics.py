# ---
# entity_id: module-evaluation-image-metrics
# entity_name: Rendering Metrics
# entity_type_id: module
# entity_path: splat_slam/evaluation/image_metrics.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T09:30:00Z
# entity_exports: [psnr, ssim, evaluate_rendering]
# entity_dependencies: [numpy, scikit-image]
# entity_callers: [cli]
# entity_callees: [render]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""PSNR and SSIM on [0, 1] images, and the held-out-frame rendering protocol."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray
from skimage.metrics import peak_signal_noise_ratio, structural_similarity

from splat_slam.gaussians.model import GaussianMap
from splat_slam.models import RenderingMetrics
from splat_slam.rendering.rasterizer import apply_exposure, render
from splat_slam.settings import RendererSettings
from splat_slam.slam.pipeline import FrameRecord

FloatArray = NDArray[np.float64]


def _check(rendered: FloatArray, reference: FloatArray) -> None:
    if rendered.shape != reference.shape:
        raise ValueError(f"image shapes differ: {rendered.shape} vs {reference.shape}")


def psnr(rendered: FloatArray, reference: FloatArray) -> float:
    """10 log10(1 / MSE) in dB; identical images give +inf."""
    _check(rendered, reference)
    if np.array_equal(rendered, reference):
        return math.inf
    return float(peak_signal_noise_ratio(reference, rendered, data_range=1.0))


def ssim(rendered: FloatArray, reference: FloatArray) -> float:
    """Gaussian-weighted SSIM (sigma 1.5, 11x11 support, k1 0.01, k2 0.03), mean over channels."""
    _check(rendered, reference)
    return float(
        structural_similarity(
            reference,
            rendered,
            data_range=1.0,
            channel_axis=-1 if reference.ndim == 3 else None,
            gaussian_weights=True,
            sigma=1.5,
            use_sample_covariance=False,
        )
    )


def evaluate_rendering(
    gaussian_map: GaussianMap,
    records: list[FrameRecord],
    settings: RendererSettings | None = None,
    threads: int = 1,
) -> RenderingMetrics | None:
    """Mean PSNR / SSIM of the final map rendered at held-out frames.

    Each record must carry its frame; rendering uses the tracked pose and
    exposure. Returns None when there is nothing to evaluate.
    """
    scores: list[tuple[float, float]] = []
    indices = []
    for record in records:
        if record.frame is None:
            continue
        output = render(
            gaussian_map,
            record.pose,
            record.frame.intrinsics,
            with_depth=False,
            record_contributors=False,
            settings=settings,
            threads=threads,
        )
        image = np.clip(
            apply_exposure(output.colour, record.exposure.a, record.exposure.b), 0.0, 1.0
        )
        scores.append((psnr(image, record.frame.rgb), ssim(image, record.frame.rgb)))
        indices.append(record.index)
    if not scores:
        return None
    finite = [p for p, _ in scores if math.isfinite(p)]
    mean_psnr = float(np.mean(finite)) if finite else math.inf
    return RenderingMetrics(
        psnr=mean_psnr,
        ssim=float(np.mean([s for _, s in scores])),
        frames=indices,
    )
