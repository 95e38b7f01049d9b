# ---
# entity_id: module-slam-tracker
# entity_name: Pose Tracker
# entity_type_id: module
# entity_path: splat_slam/slam/tracker.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-26T13:00:00Z
# entity_exports: [Tracker, TrackingResult, predict_pose, tracking_loss]
# entity_dependencies: [numpy, structlog]
# entity_callers: [pipeline, funnel]
# entity_callees: [render, backward, photometric_loss, geometric_loss, PoseOptimizer]
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
Per-frame camera pose and exposure estimation against a frozen map.

Provides:
- predict_pose: constant-velocity initialisation
- tracking_loss: photometric (+ weighted geometric) objective and its
  per-pixel gradients on a render
- Tracker.track: Adam on the twist until the step norm drops below 1e-4
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from splat_slam.errors import DivergedPose, EmptyMap
from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.lie import SE3Pose, exp_se3, log_se3
from splat_slam.logging import get_logger
from splat_slam.optim.adam import ExposureOptimizer, PoseOptimizer
from splat_slam.optim.losses import geometric_loss, photometric_loss
from splat_slam.rendering.backward import backward
from splat_slam.rendering.rasterizer import RenderOutput, render
from splat_slam.settings import SlamConfig
from splat_slam.slam.frame import Exposure, Frame

logger = get_logger(__name__)

FloatArray = NDArray[np.float64]


@dataclass
class TrackingResult:
    pose: SE3Pose
    exposure: Exposure
    iterations_used: int
    final_loss: float
    converged: bool
    losses: list[float] = field(default_factory=list)


class ObjectiveValue(NamedTuple):
    value: float
    grad_colour: FloatArray
    grad_depth: FloatArray | None


def predict_pose(
    prev: SE3Pose | None,
    prev_prev: SE3Pose | None,
    start: SE3Pose | None = None,
) -> SE3Pose:
    """Constant-velocity prediction Exp(Log(prev o prev_prev^-1)) o prev.

    Falls back to prev with one prior pose and to `start` (identity) with none.
    """
    if prev is None:
        return start if start is not None else SE3Pose.identity()
    if prev_prev is None:
        return prev
    velocity = exp_se3(log_se3(prev @ prev_prev.inverse()))
    return velocity @ prev


def tracking_loss(
    output: RenderOutput, frame: Frame, config: SlamConfig, use_depth: bool
) -> ObjectiveValue:
    """lambda_pho * E_pho + (1 - lambda_pho) * E_geo, or E_pho alone.

    The photometric term covers pixels with accumulated opacity >= the
    tracking mask threshold; the geometric term covers pixels with measured
    depth and opacity >= tau_opaque.
    """
    delta = config.losses.l1_smoothing
    photometric_mask = output.acc_opacity >= config.tracking.opacity_mask
    pho = photometric_loss(output.colour, frame.rgb, photometric_mask, delta)
    if not use_depth or frame.depth is None:
        return ObjectiveValue(pho.value, pho.grad, None)

    weight = config.losses.lambda_pho
    depth_mask = (frame.depth > 0.0) & (output.acc_opacity >= config.gaussians.tau_opaque)
    geo = geometric_loss(output.depth, frame.depth, depth_mask, delta)
    return ObjectiveValue(
        weight * pho.value + (1.0 - weight) * geo.value,
        weight * pho.grad,
        (1.0 - weight) * geo.grad,
    )


class Tracker:
    """Pose-only optimisation; the map is only read.

    With optimize_exposure=False the brightness pair stays at its initial value.
    """

    def __init__(self, config: SlamConfig, threads: int = 1, optimize_exposure: bool = True):
        self.config = config
        self.threads = threads
        self.optimize_exposure = optimize_exposure

    @property
    def use_depth(self) -> bool:
        return not self.config.is_monocular and self.config.tracking.use_depth

    def track(
        self,
        gaussian_map: GaussianMap,
        frame: Frame,
        initial_pose: SE3Pose,
        initial_exposure: Exposure = Exposure(),
        max_iterations: int | None = None,
    ) -> TrackingResult:
        """Optimise T_CW (and exposure) of `frame` against a map snapshot.

        Raises:
            EmptyMap: the map has no Gaussians.
            DivergedPose: the loss became non-finite or grew past the divergence factor.
            EmptyMask: no pixel of the frame is covered by the map.
        """
        if gaussian_map.count == 0:
            raise EmptyMap("cannot track against an empty map")
        settings = self.config.tracking
        budget = max_iterations or settings.max_iterations
        pose_optimizer = PoseOptimizer(self.config.optimizer)
        exposure_optimizer = ExposureOptimizer(self.config.optimizer)

        pose, exposure = initial_pose, initial_exposure
        losses: list[float] = []
        initial_loss = math.nan
        converged = False
        iterations = 0
        for iteration in range(budget):
            output = render(
                gaussian_map,
                pose,
                frame.intrinsics,
                with_depth=self.use_depth,
                settings=self.config.renderer,
                threads=self.threads,
            ).with_exposure(exposure.a, exposure.b)
            objective = tracking_loss(output, frame, self.config, self.use_depth)
            if iteration == 0:
                initial_loss = objective.value
            if not math.isfinite(objective.value) or (
                objective.value > settings.divergence_factor * initial_loss
            ):
                raise DivergedPose(iteration, objective.value)
            losses.append(objective.value)

            grads = backward(
                output,
                objective.grad_colour,
                objective.grad_depth,
                gaussian_map,
                self.config.renderer,
                self.threads,
            )
            pose, step_norm = pose_optimizer.step(pose, grads.d_camera_twist)
            if self.optimize_exposure:
                exposure = exposure_optimizer.step(exposure, grads.d_exposure)
            iterations = iteration + 1
            if step_norm < settings.convergence_threshold:
                converged = True
                break

        logger.debug(
            "tracked frame",
            iterations=iterations,
            loss=round(losses[-1], 6),
            converged=converged,
        )
        return TrackingResult(pose, exposure, iterations, losses[-1], converged, losses)
