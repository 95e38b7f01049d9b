# ---
# entity_id: module-slam-pipeline
# entity_name: SLAM Pipeline
# entity_type_id: module
# entity_path: splat_slam/slam/pipeline.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-27T10:00:00Z
# entity_exports: [SlamPipeline, SlamResult, FrameRecord, MapPublisher]
# entity_dependencies: [numpy, structlog]
# entity_callers: [cli]
# entity_callees: [Tracker, Mapper, should_register, maintain_window, insert_rgbd, insert_monocular]
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Frame-by-frame SLAM driver.

Provides:
- SlamPipeline: predict, track, decide, and on registration insert + map + prune
- SlamResult: per-frame records, refined keyframes and the final map
- MapPublisher: latest map snapshot shared between mapping and tracking

Sequential by default. With `interleaved`, keyframe insertion, mapping and
pruning run on one worker thread while the driver keeps tracking against
the most recently published snapshot.
"""

from __future__ import annotations

import threading
from collections.abc import Callable, Iterable
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field

from splat_slam.errors import DivergedPose, EmptyMap, EmptyMask, TrackingLost
from splat_slam.gaussians.insertion import insert_monocular, insert_rgbd
from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.lie import SE3Pose
from splat_slam.logging import frame_context, get_logger
from splat_slam.models import MappingSummary, RunSummary
from splat_slam.rendering.rasterizer import RenderOutput, median_depth, render
from splat_slam.settings import SlamConfig
from splat_slam.slam.frame import Exposure, Frame, Keyframe
from splat_slam.slam.keyframes import (
    FrameStats,
    KeyframeWindow,
    RegistrationDecision,
    RegistrationReason,
    maintain_window,
    should_register,
)
from splat_slam.slam.mapper import Mapper
from splat_slam.slam.tracker import Tracker, predict_pose

logger = get_logger(__name__)

# every n-th frame is a rendering-evaluation candidate
EVALUATION_STRIDE = 5


@dataclass
class FrameRecord:
    index: int
    timestamp: float
    pose: SE3Pose
    keyframe_id: int | None = None
    tracking_failed: bool = False
    frame: Frame | None = None
    exposure: Exposure = Exposure()

    @property
    def is_keyframe(self) -> bool:
        return self.keyframe_id is not None


@dataclass
class SlamResult:
    records: list[FrameRecord]
    keyframes: dict[int, Keyframe]
    gaussian_map: GaussianMap
    mapping: list[MappingSummary] = field(default_factory=list)
    tracking_failures: int = 0

    def pose_of(self, record: FrameRecord) -> SE3Pose:
        """Refined pose for keyframes, tracked pose otherwise."""
        if record.keyframe_id is not None:
            return self.keyframes[record.keyframe_id].pose
        return record.pose

    def trajectory(self, keyframes_only: bool = True) -> tuple[list[float], list[SE3Pose]]:
        chosen = [r for r in self.records if r.is_keyframe or not keyframes_only]
        return [r.timestamp for r in chosen], [self.pose_of(r) for r in chosen]

    def held_out(self) -> list[FrameRecord]:
        """Every fifth frame that did not become a keyframe."""
        return [r for r in self.records if r.frame is not None and not r.is_keyframe]

    def summary(self) -> RunSummary:
        return RunSummary(
            frames=len(self.records),
            keyframes=len(self.keyframes),
            gaussians=self.gaussian_map.count,
            tracking_failures=self.tracking_failures,
        )


class MapPublisher:
    """Latest published map snapshot, safe to read from another thread."""

    def __init__(self, gaussian_map: GaussianMap):
        self._lock = threading.Lock()
        self._snapshot = gaussian_map.snapshot()
        self.published = 0

    def publish(self, gaussian_map: GaussianMap, iteration: int = 0) -> None:
        snapshot = gaussian_map.snapshot()
        with self._lock:
            self._snapshot = snapshot
            self.published += 1
        logger.debug("published map", iteration=iteration, gaussians=snapshot.count)

    def latest(self) -> GaussianMap:
        with self._lock:
            return self._snapshot


class SlamPipeline:
    """Owns the map, the keyframes and the window for one sequence.

    Args:
        config: Run configuration.
        threads: Tile parallelism for render and backward.
        start_pose: Pose given to the first frame.
    """

    def __init__(
        self,
        config: SlamConfig,
        threads: int = 1,
        start_pose: SE3Pose | None = None,
    ):
        self.config = config
        self.threads = threads
        self.start_pose = start_pose or SE3Pose.identity()
        self.map = GaussianMap.empty(config.seed)
        self.keyframes: dict[int, Keyframe] = {}
        self.window = KeyframeWindow(capacity=config.keyframes.window_size)
        self.records: list[FrameRecord] = []
        self.mapping: list[MappingSummary] = []
        self.tracker = Tracker(config, threads)
        self.publisher: MapPublisher | None = None
        listener: Callable[[GaussianMap, int], None] | None = None
        if config.interleaved:
            self.publisher = MapPublisher(self.map)
            listener = self.publisher.publish
        self.mapper = Mapper(config, self.map, threads, listener=listener)
        self._worker: ThreadPoolExecutor | None = None
        self._pending: list[Future[MappingSummary]] = []
        self._last_keyframe: Keyframe | None = None
        self._since_keyframe = 0
        self._next_keyframe_id = 0
        self._exposure = Exposure()
        self._consecutive_failures = 0
        self.tracking_failures = 0

    def _tracking_map(self) -> GaussianMap:
        if self.publisher is not None:
            return self.publisher.latest()
        return self.map

    def _render_stats(
        self, gaussian_map: GaussianMap, frame: Frame, pose: SE3Pose
    ) -> RenderOutput:
        return render(
            gaussian_map,
            pose,
            frame.intrinsics,
            record_contributors=False,
            settings=self.config.renderer,
            threads=self.threads,
        )

    def _insert(self, keyframe: Keyframe, rendered: RenderOutput) -> None:
        frame = keyframe.frame
        stride = self.config.gaussians.insertion_stride
        if not self.config.is_monocular and frame.depth is not None:
            insert_rgbd(
                self.map,
                frame,
                keyframe.pose,
                stride,
                keyframe.keyframe_id,
                self.config.gaussians.initial_opacity,
            )
        else:
            insert_monocular(
                self.map,
                frame,
                keyframe.pose,
                rendered.depth,
                rendered.acc_opacity,
                stride,
                keyframe.keyframe_id,
                self.config.gaussians,
            )

    def _keyframe_event(self, keyframe: Keyframe, rendered: RenderOutput) -> MappingSummary:
        """Insert, update the window, map and prune. Runs on the mapping thread when interleaved."""
        self._insert(keyframe, rendered)
        self.keyframes[keyframe.keyframe_id] = keyframe
        maintain_window(self.window, keyframe, self.config.keyframes.kf_c)
        summary = self.mapper.run_mapping(
            self.window, self.keyframes, self.config.mapping_budget, keyframe.keyframe_id
        )
        self.mapping.append(summary)
        return summary

    def _register(
        self, frame: Frame, pose: SE3Pose, rendered: RenderOutput, reason: RegistrationReason
    ) -> Keyframe:
        keyframe = Keyframe(
            keyframe_id=self._next_keyframe_id,
            frame=frame,
            pose=pose,
            exposure=self._exposure,
            visible=rendered.visible_ids(),
            median_depth=median_depth(rendered, self.config.gaussians.tau_opaque),
        )
        logger.info("registered keyframe", keyframe=keyframe.keyframe_id, reason=reason.value)
        self._last_keyframe = keyframe
        self._next_keyframe_id += 1
        self._since_keyframe = 0
        if self._worker is None:
            self._keyframe_event(keyframe, rendered)
        else:
            self._collect()
            self._pending.append(self._worker.submit(self._keyframe_event, keyframe, rendered))
        return keyframe

    def _collect(self) -> None:
        """Re-raise worker failures and drop finished jobs."""
        still_running = []
        for future in self._pending:
            if future.done():
                future.result()
            else:
                still_running.append(future)
        self._pending = still_running

    def _track(self, frame: Frame) -> tuple[SE3Pose, bool]:
        previous = self.records[-1].pose if self.records else None
        before = self.records[-2].pose if len(self.records) > 1 else None
        predicted = predict_pose(previous, before, self.start_pose)
        try:
            result = self.tracker.track(self._tracking_map(), frame, predicted, self._exposure)
        except (DivergedPose, EmptyMask, EmptyMap) as exc:
            self.tracking_failures += 1
            self._consecutive_failures += 1
            logger.warning(
                "tracking failed, using predicted pose",
                error=str(exc),
                consecutive=self._consecutive_failures,
            )
            if self._consecutive_failures > self.config.tracking.max_consecutive_failures:
                raise TrackingLost(
                    f"tracking failed on {self._consecutive_failures} consecutive frames"
                ) from exc
            return predicted, True
        self._consecutive_failures = 0
        self._exposure = result.exposure
        return result.pose, False

    def _decide(self, stats: FrameStats) -> RegistrationDecision:
        last = self._last_keyframe
        assert last is not None
        if self.config.keyframes.use_covisibility:
            reference = FrameStats(last.visible, last.pose, last.median_depth)
            return should_register(stats, reference, self.config.keyframes)
        register = self._since_keyframe >= self.config.keyframes.fixed_interval
        reason = RegistrationReason.INTERVAL if register else RegistrationReason.NONE
        return RegistrationDecision(register, reason, 0.0, 0.0)

    def process(self, frame: Frame) -> FrameRecord:
        """Track one frame and, if it becomes a keyframe, run its mapping."""
        with frame_context(frame.index, frame.timestamp):
            if self._last_keyframe is None:
                rendered = self._render_stats(self.map, frame, self.start_pose)
                keyframe = self._keyframe_event_first(frame, rendered)
                record = FrameRecord(
                    frame.index, frame.timestamp, self.start_pose, keyframe.keyframe_id
                )
                self.records.append(record)
                return record

            pose, failed = self._track(frame)
            self._since_keyframe += 1
            rendered = self._render_stats(self._tracking_map(), frame, pose)
            visible = rendered.visible_ids()
            stats = FrameStats(
                visible, pose, median_depth(rendered, self.config.gaussians.tau_opaque)
            )
            decision = self._decide(stats)
            keyframe_id = None
            if decision.register:
                keyframe_id = self._register(frame, pose, rendered, decision.reason).keyframe_id
            keep_frame = keyframe_id is None and frame.index % EVALUATION_STRIDE == 0
            record = FrameRecord(
                frame.index,
                frame.timestamp,
                pose,
                keyframe_id,
                failed,
                frame if keep_frame else None,
                self._exposure,
            )
            self.records.append(record)
            logger.debug(
                "frame done",
                keyframe=keyframe_id,
                iou=round(decision.iou, 4),
                visible=len(visible),
            )
            return record

    def _keyframe_event_first(self, frame: Frame, rendered: RenderOutput) -> Keyframe:
        """The first frame is always a keyframe and is mapped before tracking starts."""
        keyframe = Keyframe(0, frame, self.start_pose, self._exposure)
        logger.info("registered keyframe", keyframe=0, reason=RegistrationReason.FIRST.value)
        self._last_keyframe = keyframe
        self._next_keyframe_id = 1
        self._keyframe_event(keyframe, rendered)
        if self.publisher is not None:
            self.publisher.publish(self.map)
        return keyframe

    def run(self, frames: Iterable[Frame]) -> SlamResult:
        """Process a whole sequence in order."""
        if self.config.interleaved:
            self._worker = ThreadPoolExecutor(max_workers=1, thread_name_prefix="mapping")
        try:
            for frame in frames:
                self.process(frame)
                if self._worker is not None:
                    self._collect()
        finally:
            if self._worker is not None:
                self._worker.shutdown(wait=True)
                pending, self._pending = self._pending, []
                self._worker = None
                for future in pending:
                    future.result()
        logger.info(
            "sequence finished",
            frames=len(self.records),
            keyframes=len(self.keyframes),
            gaussians=self.map.count,
            tracking_failures=self.tracking_failures,
        )
        return SlamResult(
            self.records,
            self.keyframes,
            self.map,
            self.mapping,
            self.tracking_failures,
        )
