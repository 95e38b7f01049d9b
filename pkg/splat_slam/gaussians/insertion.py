# ---
# entity_id: module-gaussian-insertion
# entity_name: Gaussian Insertion
# entity_type_id: module
# entity_path: splat_slam/gaussians/insertion.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T11:30:00Z
# entity_exports: [insert_rgbd, insert_monocular, depth_statistics]
# entity_dependencies: [numpy, structlog]
# entity_callers: [pipeline, funnel]
# entity_callees: [GaussianMap.append, backproject]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
Keyframe-driven Gaussian insertion.

Provides:
- insert_rgbd: back-project strided pixels with valid measured depth
- insert_monocular: sample depths around the rendered depth, or around
  the median rendered depth where the map has no estimate yet
- depth_statistics: median and spread of rendered depths
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from splat_slam.errors import EmptyMapBootstrap
from splat_slam.gaussians.model import GaussianMap, colour_to_logit, logit
from splat_slam.geometry.camera import EPSILON_Z, CameraIntrinsics, backproject
from splat_slam.geometry.lie import SE3Pose
from splat_slam.logging import get_logger
from splat_slam.settings import GaussianSettings
from splat_slam.slam.frame import Frame

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]

MIN_SAMPLED_DEPTH = 2.0 * EPSILON_Z


def _strided_grid(height: int, width: int, stride: int) -> tuple[FloatArray, FloatArray]:
    vs, us = np.meshgrid(
        np.arange(0, height, stride, dtype=np.float64),
        np.arange(0, width, stride, dtype=np.float64),
        indexing="ij",
    )
    return us.ravel(), vs.ravel()


def _append_from_pixels(
    gaussian_map: GaussianMap,
    frame: Frame,
    pose: SE3Pose,
    us: FloatArray,
    vs: FloatArray,
    depths: FloatArray,
    keyframe_id: int,
    initial_opacity: float,
) -> range:
    K: CameraIntrinsics = frame.intrinsics
    mean_c = backproject(us, vs, depths, K)
    mean_w = pose.inverse().apply(mean_c)
    # one-pixel footprint at the insertion depth
    extent = depths * 2.0 / (K.fx + K.fy)
    log_scale = np.repeat(np.log(extent)[:, None], 3, axis=1)
    n = depths.shape[0]
    rotation_q = np.tile(np.array([1.0, 0.0, 0.0, 0.0]), (n, 1))
    opacity_logit = np.full(n, float(logit(initial_opacity)))
    colours = frame.rgb[vs.astype(np.int64), us.astype(np.int64)]
    return gaussian_map.append(
        mean_w, log_scale, rotation_q, opacity_logit, colour_to_logit(colours), keyframe_id
    )


def insert_rgbd(
    gaussian_map: GaussianMap,
    frame: Frame,
    pose: SE3Pose,
    stride: int,
    keyframe_id: int = 0,
    initial_opacity: float = 0.5,
) -> range:
    """Insert one Gaussian per strided pixel with positive measured depth.

    Args:
        gaussian_map: Map to extend in place.
        frame: Observation carrying a depth image.
        pose: World-to-camera pose of the frame.
        stride: Pixel stride in both image axes.
        keyframe_id: Origin keyframe recorded on every new row.
        initial_opacity: Activated opacity of new Gaussians.

    Returns:
        Row range of the inserted Gaussians.
    """
    if frame.depth is None:
        raise ValueError("insert_rgbd needs a frame with depth")
    height, width = frame.depth.shape
    us, vs = _strided_grid(height, width, stride)
    depths = frame.depth[vs.astype(np.int64), us.astype(np.int64)]
    valid = np.isfinite(depths) & (depths > 0.0)
    inserted = _append_from_pixels(
        gaussian_map,
        frame,
        pose,
        us[valid],
        vs[valid],
        depths[valid],
        keyframe_id,
        initial_opacity,
    )
    logger.info("inserted gaussians", source="depth", count=len(inserted), keyframe=keyframe_id)
    return inserted


def depth_statistics(
    rendered_depth: FloatArray, rendered_opacity: FloatArray, tau_opaque: float
) -> tuple[float, float]:
    """Median and standard deviation of rendered depths where opacity >= tau_opaque.

    Raises:
        EmptyMapBootstrap: no pixel carries a depth estimate.
    """
    valid = rendered_opacity >= tau_opaque
    if not np.any(valid):
        raise EmptyMapBootstrap("no rendered depth estimates")
    depths = rendered_depth[valid]
    return float(np.median(depths)), float(np.std(depths))


def insert_monocular(
    gaussian_map: GaussianMap,
    frame: Frame,
    pose: SE3Pose,
    rendered_depth: FloatArray,
    rendered_opacity: FloatArray,
    stride: int,
    keyframe_id: int = 0,
    settings: GaussianSettings | None = None,
) -> range:
    """Insert Gaussians at sampled depths for a frame without measured depth.

    Pixels whose rendered opacity reaches tau_opaque draw their depth from
    N(D_p, (0.2 sigma_D)^2); the rest draw from N(median, (0.5 sigma_D)^2).
    With no valid pixel at all, median and sigma_D fall back to the
    bootstrap values. Normal draws come from the map's generator in
    row-major pixel order.
    """
    settings = settings or GaussianSettings()
    try:
        median, spread = depth_statistics(rendered_depth, rendered_opacity, settings.tau_opaque)
    except EmptyMapBootstrap:
        median, spread = settings.bootstrap_depth, settings.bootstrap_depth_std
        logger.info("bootstrap depth", keyframe=keyframe_id, median=median, std=spread)

    height, width = rendered_depth.shape
    us, vs = _strided_grid(height, width, stride)
    rows, cols = vs.astype(np.int64), us.astype(np.int64)
    valid = rendered_opacity[rows, cols] >= settings.tau_opaque

    centre = np.where(valid, rendered_depth[rows, cols], median)
    std = np.where(
        valid,
        settings.valid_depth_std_factor * spread,
        settings.invalid_depth_std_factor * spread,
    )
    noise = gaussian_map.rng.standard_normal(us.shape[0])
    depths = np.maximum(centre + std * noise, MIN_SAMPLED_DEPTH)

    inserted = _append_from_pixels(
        gaussian_map, frame, pose, us, vs, depths, keyframe_id, settings.initial_opacity
    )
    logger.info(
        "inserted gaussians",
        source="sampled",
        count=len(inserted),
        with_estimate=int(np.count_nonzero(valid)),
        keyframe=keyframe_id,
        median_depth=round(median, 4) if math.isfinite(median) else None,
    )
    return inserted
