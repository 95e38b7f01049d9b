# ---
# entity_id: module-slam-keyframes
# entity_name: Keyframe Manager
# entity_type_id: module
# entity_path: splat_slam/slam/keyframes.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-26T11:00:00Z
# entity_exports: [covisibility, should_register, maintain_window, sample_random_past]
# entity_dependencies: [numpy, structlog]
# entity_callers: [pipeline, mapper]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
Covisibility-based keyframe management.

Provides:
- covisibility: IOU and overlap coefficient of two visible-Gaussian sets
- should_register: covisibility / baseline keyframe decision
- KeyframeWindow + maintain_window: bounded window W_k with OC eviction
- sample_random_past: W_r drawn from keyframes outside the window
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np

from splat_slam.geometry.lie import SE3Pose
from splat_slam.logging import get_logger
from splat_slam.settings import KeyframeSettings
from splat_slam.slam.frame import Keyframe

logger = get_logger(__name__)


class Covisibility(NamedTuple):
    iou: float
    oc: float


def covisibility(visible_i: Iterable[int], visible_j: Iterable[int]) -> Covisibility:
    """IOU = |i & j| / |i | j| and OC = |i & j| / min(|i|, |j|)."""
    a, b = frozenset(visible_i), frozenset(visible_j)
    if not a and not b:
        logger.warning("covisibility of two empty sets")
        return Covisibility(0.0, 0.0)
    shared = len(a & b)
    smaller = min(len(a), len(b))
    oc = shared / smaller if smaller else 0.0
    return Covisibility(shared / len(a | b), oc)


class RegistrationReason(str, Enum):
    NONE = "none"
    COVISIBILITY = "covisibility"
    BASELINE = "baseline"
    INTERVAL = "interval"
    FIRST = "first"


@dataclass(frozen=True)
class FrameStats:
    """What the keyframe decision needs about a view."""

    visible: frozenset[int]
    pose: SE3Pose
    median_depth: float


class RegistrationDecision(NamedTuple):
    register: bool
    reason: RegistrationReason
    iou: float
    baseline: float


def should_register(
    current: FrameStats, last_keyframe: FrameStats, settings: KeyframeSettings
) -> RegistrationDecision:
    """Register when IOU < kf_cov or the camera moved more than kf_m times the median depth."""
    iou = covisibility(current.visible, last_keyframe.visible).iou
    baseline = float(
        np.linalg.norm(current.pose.camera_center() - last_keyframe.pose.camera_center())
    )
    if iou < settings.kf_cov:
        return RegistrationDecision(True, RegistrationReason.COVISIBILITY, iou, baseline)
    if baseline > settings.kf_m * current.median_depth:
        return RegistrationDecision(True, RegistrationReason.BASELINE, iou, baseline)
    return RegistrationDecision(False, RegistrationReason.NONE, iou, baseline)


@dataclass
class KeyframeWindow:
    """Ordered window W_k, oldest first; the last entry is the latest keyframe."""

    capacity: int
    entries: list[Keyframe] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Keyframe]:
        return iter(self.entries)

    @property
    def is_full(self) -> bool:
        return len(self.entries) >= self.capacity

    @property
    def latest(self) -> Keyframe:
        return self.entries[-1]

    @property
    def oldest(self) -> Keyframe:
        return self.entries[0]

    def ids(self) -> list[int]:
        return [kf.keyframe_id for kf in self.entries]


def maintain_window(
    window: KeyframeWindow, new_keyframe: Keyframe, kf_c: float = 0.3
) -> list[int]:
    """Add new_keyframe, then evict by overlap coefficient to it.

    Entries with OC below kf_c go first; while still over capacity the
    lowest-OC entry is evicted, the oldest winning ties. The new keyframe is
    never evicted.

    Returns:
        Evicted keyframe ids in eviction order.
    """
    window.entries.append(new_keyframe)
    overlap = {
        kf.keyframe_id: covisibility(new_keyframe.visible, kf.visible).oc
        for kf in window.entries[:-1]
    }
    evicted = [kf_id for kf_id in window.ids()[:-1] if overlap[kf_id] < kf_c]
    window.entries = [kf for kf in window.entries if kf.keyframe_id not in evicted]

    while len(window.entries) > window.capacity:
        candidates = window.entries[:-1]
        victim = min(range(len(candidates)), key=lambda i: (overlap[candidates[i].keyframe_id], i))
        evicted.append(candidates[victim].keyframe_id)
        del window.entries[victim]

    if evicted:
        logger.debug("evicted keyframes", evicted=evicted, window=window.ids())
    return evicted


def sample_random_past(
    all_keyframes: Sequence[int],
    window: KeyframeWindow,
    rng: np.random.Generator,
    count: int = 2,
) -> list[int]:
    """Up to `count` registered keyframe ids outside the window, uniformly without replacement."""
    in_window = set(window.ids())
    candidates = sorted(kf_id for kf_id in all_keyframes if kf_id not in in_window)
    if len(candidates) <= count:
        return candidates
    picks = rng.choice(len(candidates), size=count, replace=False)
    return [candidates[int(i)] for i in picks]
