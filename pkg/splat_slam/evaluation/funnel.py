# ---
# entity_id: module-evaluation-funnel
# entity_name: Convergence Funnel
# entity_type_id: module
# entity_path: splat_slam/evaluation/funnel.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T10:00:00Z
# entity_exports: [train_funnel_map, localise, funnel_analysis, run_funnel]
# entity_dependencies: [numpy, structlog]
# entity_callers: [cli]
# entity_callees: [Mapper.map_step, Tracker.track, insert_rgbd, insert_monocular]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
Convergence-basin analysis of pose-only localisation.

A map is trained from the nine square views with their poses frozen, then
the camera is localised against the centre view's colour image from
starts displaced in translation only. A start succeeds when the final
camera position lies within `funnel.success_threshold` of the target.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from typing import NamedTuple

import numpy as np

from splat_slam.datasets.synthetic import SyntheticScene
from splat_slam.errors import DivergedPose, EmptyMask
from splat_slam.gaussians.insertion import insert_monocular, insert_rgbd
from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.lie import SE3Pose, rotation_angle_between
from splat_slam.logging import get_logger
from splat_slam.models import FunnelReport, RingResult
from splat_slam.settings import Mode, SlamConfig
from splat_slam.slam.frame import Frame, Keyframe
from splat_slam.slam.keyframes import KeyframeWindow
from splat_slam.slam.mapper import Mapper
from splat_slam.slam.tracker import Tracker

logger = get_logger(__name__)


class Trial(NamedTuple):
    translation_error: float
    rotation_error_deg: float
    success: bool


def _training_config(config: SlamConfig, with_depth: bool) -> SlamConfig:
    mode = Mode.RGBD if with_depth else Mode.MONOCULAR
    return config.model_copy(update={"mode": mode, "interleaved": False})


def train_funnel_map(
    scene: SyntheticScene,
    with_depth: bool,
    iterations: int,
    config: SlamConfig,
    progress: Callable[[int], None] | None = None,
) -> GaussianMap:
    """Fit a map to the scene's training views with every pose held fixed.

    With depth, Gaussians start from back-projected depth and the RGB-D
    mapping cost is minimised; without, positions start at random depths
    around the bootstrap depth and only the photometric cost is used.
    """
    training_config = _training_config(config, with_depth)
    gaussian_map = GaussianMap.empty(config.seed)
    keyframes: dict[int, Keyframe] = {}
    stride = config.gaussians.insertion_stride
    empty = np.zeros((scene.intrinsics.height, scene.intrinsics.width))
    for index, (frame, pose) in enumerate(zip(scene.frames, scene.poses, strict=True)):
        if with_depth and frame.depth is not None:
            insert_rgbd(gaussian_map, frame, pose, stride, index, config.gaussians.initial_opacity)
        else:
            frame = Frame(frame.index, frame.timestamp, frame.rgb, frame.intrinsics)
            insert_monocular(
                gaussian_map, frame, pose, empty, empty, stride, index, config.gaussians
            )
        keyframes[index] = Keyframe(index, frame, pose)

    window = KeyframeWindow(capacity=len(keyframes), entries=list(keyframes.values()))
    mapper = Mapper(training_config, gaussian_map, optimize_poses=False)
    mapper.optimizer.sync(gaussian_map)
    for iteration in range(iterations):
        mapper.map_step(window, keyframes)
        if progress is not None:
            progress(iteration + 1)
    logger.info(
        "trained funnel map",
        with_depth=with_depth,
        iterations=iterations,
        gaussians=gaussian_map.count,
    )
    return gaussian_map


def localise(
    gaussian_map: GaussianMap,
    target_frame: Frame,
    target_pose: SE3Pose,
    start: SE3Pose,
    iterations: int,
    config: SlamConfig,
) -> Trial:
    """Photometric pose-only optimisation from one start against the target image."""
    photometric = config.model_copy(
        update={
            "mode": Mode.MONOCULAR,
            "tracking": config.tracking.model_copy(update={"use_depth": False}),
        }
    )
    tracker = Tracker(photometric, optimize_exposure=False)
    frame = Frame(
        target_frame.index, target_frame.timestamp, target_frame.rgb, target_frame.intrinsics
    )
    try:
        result = tracker.track(gaussian_map, frame, start, max_iterations=iterations)
    except (DivergedPose, EmptyMask) as exc:
        logger.debug("localisation failed", error=str(exc))
        return Trial(math.inf, math.inf, False)
    translation_error = float(
        np.linalg.norm(result.pose.camera_center() - target_pose.camera_center())
    )
    rotation_error = math.degrees(rotation_angle_between(result.pose, target_pose))
    success = translation_error < config.funnel.success_threshold
    return Trial(translation_error, rotation_error, success)


def funnel_analysis(
    gaussian_map: GaussianMap,
    target_frame: Frame,
    target_pose: SE3Pose,
    starts: Sequence[SE3Pose],
    iterations: int,
    config: SlamConfig,
    radius: float = 0.0,
) -> RingResult:
    """Localise from every start; the success rate is successes / starts."""
    trials = [
        localise(gaussian_map, target_frame, target_pose, start, iterations, config)
        for start in starts
    ]
    ring = RingResult(
        radius=radius,
        starts=len(trials),
        successes=sum(trial.success for trial in trials),
        translation_errors=[trial.translation_error for trial in trials],
        rotation_errors_deg=[trial.rotation_error_deg for trial in trials],
    )
    logger.info(
        "funnel ring",
        radius=radius,
        success_rate=round(ring.success_rate, 4),
        median_rotation_error_deg=float(np.median(ring.rotation_errors_deg)) if trials else None,
    )
    return ring


def run_funnel(
    scene: SyntheticScene,
    config: SlamConfig,
    with_depth: bool | None = None,
    progress: Callable[[int], None] | None = None,
) -> FunnelReport:
    """Train on the scene and analyse every ring of test starts."""
    settings = config.funnel
    use_depth = settings.with_depth if with_depth is None else with_depth
    gaussian_map = train_funnel_map(
        scene, use_depth, settings.training_iterations, config, progress
    )
    target_frame = scene.frames[scene.target_index or 0]
    rings = [
        funnel_analysis(
            gaussian_map,
            target_frame,
            scene.target_pose,
            starts,
            settings.iterations,
            config,
            radius,
        )
        for radius, starts in sorted(scene.test_poses.items())
    ]
    return FunnelReport(with_depth=use_depth, iterations=settings.iterations, rings=rings)
