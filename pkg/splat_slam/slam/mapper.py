# ---
# entity_id: module-slam-mapper
# entity_name: Window Mapper
# entity_type_id: module
# entity_path: splat_slam/slam/mapper.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-26T15:00:00Z
# entity_exports: [Mapper, mapping_loss]
# entity_dependencies: [numpy, structlog]
# entity_callers: [pipeline, funnel]
# entity_callees: [render, backward, isotropic_loss, GaussianOptimizer, PoseOptimizer, prune]
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
Joint refinement of window keyframe poses and the Gaussians they see.

Provides:
- mapping_loss: per-keyframe photometric (+ geometric) objective
- Mapper.map_step: one iteration over W_k plus freshly drawn random past
  keyframes, a Gaussian step and a pose step for every non-gauge keyframe
- Mapper.run_mapping: a keyframe's mapping budget followed by pruning

The oldest keyframe of the window is the gauge and never moves. Keyframe
exposures stay frozen while mapping.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping

import numpy as np
from numpy.typing import NDArray

from splat_slam.errors import InvalidBudget
from splat_slam.gaussians.model import GaussianMap
from splat_slam.gaussians.pruning import count_observers, prune
from splat_slam.logging import get_logger
from splat_slam.models import MappingSummary
from splat_slam.optim.adam import GaussianOptimizer, PoseOptimizer
from splat_slam.optim.losses import geometric_loss, isotropic_loss, photometric_loss
from splat_slam.rendering.backward import GradientBuffers, backward
from splat_slam.rendering.rasterizer import RenderOutput, median_depth, render
from splat_slam.settings import SlamConfig
from splat_slam.slam.frame import Keyframe
from splat_slam.slam.keyframes import KeyframeWindow, sample_random_past
from splat_slam.slam.tracker import ObjectiveValue

logger = get_logger(__name__)

MapListener = Callable[[GaussianMap, int], None]


def mapping_loss(output: RenderOutput, keyframe: Keyframe, config: SlamConfig) -> ObjectiveValue:
    """Photometric loss over every pixel, plus the geometric term where depth was measured.

    The geometric term is used in RGB-D mode only and is skipped for a
    keyframe without any valid depth pixel.
    """
    frame = keyframe.frame
    delta = config.losses.l1_smoothing
    everywhere = np.ones(output.acc_opacity.shape, dtype=bool)
    pho = photometric_loss(output.colour, frame.rgb, everywhere, delta)
    if config.is_monocular or frame.depth is None:
        return ObjectiveValue(pho.value, pho.grad, None)
    measured = frame.depth > 0.0
    if not np.any(measured):
        return ObjectiveValue(pho.value, pho.grad, None)

    weight = config.losses.lambda_pho
    geo = geometric_loss(output.depth, frame.depth, measured, delta)
    return ObjectiveValue(
        weight * pho.value + (1.0 - weight) * geo.value,
        weight * pho.grad,
        (1.0 - weight) * geo.grad,
    )


class Mapper:
    """Sole writer of the live map.

    Args:
        config: Run configuration.
        gaussian_map: The live map, updated in place.
        threads: Tile parallelism for render and backward.
        optimize_poses: False freezes every keyframe pose (map training).
        listener: Called with (map, iteration) every `mapping.publish_every`
            iterations and after each mapping run.
    """

    def __init__(
        self,
        config: SlamConfig,
        gaussian_map: GaussianMap,
        threads: int = 1,
        optimize_poses: bool = True,
        listener: MapListener | None = None,
    ):
        self.config = config
        self.map = gaussian_map
        self.threads = threads
        self.optimize_poses = optimize_poses
        self.listener = listener
        self.optimizer = GaussianOptimizer(config.optimizer, monocular=config.is_monocular)
        self.pose_optimizers: dict[int, PoseOptimizer] = {}
        self.rng = np.random.default_rng(config.seed)
        self.last_regularizer = 0.0

    def _pose_optimizer(self, keyframe_id: int) -> PoseOptimizer:
        if keyframe_id not in self.pose_optimizers:
            self.pose_optimizers[keyframe_id] = PoseOptimizer(self.config.optimizer)
        return self.pose_optimizers[keyframe_id]

    def map_step(
        self, window: KeyframeWindow, keyframes: Mapping[int, Keyframe]
    ) -> dict[int, float]:
        """Run one mapping iteration.

        Args:
            window: W_k; its oldest entry is the gauge.
            keyframes: Every registered keyframe by id, the pool for W_r.

        Returns:
            Loss per participating keyframe id, before the update.
        """
        gauge = window.oldest.keyframe_id
        past = sample_random_past(
            list(keyframes), window, self.rng, self.config.keyframes.random_past
        )
        participants = list(window) + [keyframes[kf_id] for kf_id in past]

        total = GradientBuffers.zeros(self.map.count)
        twists: dict[int, NDArray[np.float64]] = {}
        losses: dict[int, float] = {}
        for keyframe in participants:
            output = render(
                self.map,
                keyframe.pose,
                keyframe.intrinsics,
                settings=self.config.renderer,
                threads=self.threads,
            ).with_exposure(keyframe.exposure.a, keyframe.exposure.b)
            objective = mapping_loss(output, keyframe, self.config)
            grads = backward(
                output,
                objective.grad_colour,
                objective.grad_depth,
                self.map,
                self.config.renderer,
                self.threads,
            )
            twists[keyframe.keyframe_id] = grads.d_camera_twist.copy()
            total.accumulate(grads)
            losses[keyframe.keyframe_id] = objective.value
            keyframe.visible = output.visible_ids()
            keyframe.median_depth = median_depth(output, self.config.gaussians.tau_opaque)

        if self.config.mapping.use_isotropic and self.map.count:
            iso = isotropic_loss(self.map.log_scale)
            self.last_regularizer = self.config.losses.lambda_iso * iso.value
            total.d_log_scale += self.config.losses.lambda_iso * iso.grad

        self.optimizer.step(self.map, total)
        if self.optimize_poses:
            for keyframe in participants:
                if keyframe.keyframe_id == gauge:
                    continue
                optimizer = self._pose_optimizer(keyframe.keyframe_id)
                keyframe.pose, _ = optimizer.step(keyframe.pose, twists[keyframe.keyframe_id])
        return losses

    def run_mapping(
        self,
        window: KeyframeWindow,
        keyframes: Mapping[int, Keyframe],
        budget: int,
        current_kf_id: int,
    ) -> MappingSummary:
        """`budget` map steps for the keyframe event, then pruning.

        Raises:
            InvalidBudget: budget < 1.
        """
        if budget < 1:
            raise InvalidBudget(f"mapping budget must be >= 1, got {budget}")
        self.optimizer.sync(self.map)
        publish_every = self.config.mapping.publish_every
        initial_loss = final_loss = 0.0
        for iteration in range(budget):
            losses = self.map_step(window, keyframes)
            final_loss = sum(losses.values()) + self.last_regularizer
            if iteration == 0:
                initial_loss = final_loss
            if self.listener is not None and (iteration + 1) % publish_every == 0:
                self.listener(self.map, iteration + 1)

        pruned = 0
        if self.config.gaussians.use_pruning:
            observers = count_observers(self.map, window.entries)
            pruned = prune(
                self.map,
                window.entries,
                observers,
                current_kf_id,
                window.capacity,
                self.config.gaussians,
            )
            self.optimizer.sync(self.map)
            if pruned:
                surviving = frozenset(self.map.creation_order.tolist())
                for keyframe in keyframes.values():
                    keyframe.visible = keyframe.visible & surviving
        if self.listener is not None:
            self.listener(self.map, budget)

        summary = MappingSummary(
            keyframe_id=current_kf_id,
            iterations=budget,
            initial_loss=initial_loss,
            final_loss=final_loss,
            pruned=pruned,
            gaussians=self.map.count,
            window=window.ids(),
        )
        logger.info(
            "mapping finished",
            keyframe=current_kf_id,
            iterations=budget,
            initial_loss=round(initial_loss, 6),
            final_loss=round(final_loss, 6),
            pruned=pruned,
            gaussians=self.map.count,
        )
        return summary
