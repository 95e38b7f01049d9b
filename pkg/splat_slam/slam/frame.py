# ---
# entity_id: module-slam-frame
# entity_name: Frames and Keyframes
# entity_type_id: module
# entity_path: splat_slam/slam/frame.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T11:00:00Z
# entity_exports: [Frame, Keyframe, Exposure]
# entity_dependencies: [numpy]
# entity_callers: [tracker, keyframes, mapper, pipeline, insertion, datasets]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""Observations (Frame) and registered keyframes with their mutable state."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose


class Exposure(NamedTuple):
    """Affine brightness out = exp(a) * in + b."""

    a: float = 0.0
    b: float = 0.0


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB(-D) observation. rgb is (H, W, 3) in [0, 1], depth in metres or None."""

    index: int
    timestamp: float
    rgb: NDArray[np.float64]
    intrinsics: CameraIntrinsics
    depth: NDArray[np.float64] | None = None

    @property
    def has_depth(self) -> bool:
        return self.depth is not None


@dataclass(eq=False)
class Keyframe:
    keyframe_id: int
    frame: Frame
    pose: SE3Pose
    exposure: Exposure = Exposure()
    visible: frozenset[int] = field(default_factory=frozenset)
    median_depth: float = 0.0

    @property
    def intrinsics(self) -> CameraIntrinsics:
        return self.frame.intrinsics
