# ---
# entity_id: module-gaussian-pruning
# entity_name: Gaussian Pruning
# entity_type_id: module
# entity_path: splat_slam/gaussians/pruning.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T11:30:00Z
# entity_exports: [prune, prunable_mask, count_observers]
# entity_dependencies: [numpy, structlog]
# entity_callers: [mapper]
# entity_callees: [GaussianMap.compact]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""Visibility- and opacity-based pruning, run at keyframe registration."""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from splat_slam.gaussians.model import GaussianMap
from splat_slam.logging import get_logger
from splat_slam.settings import GaussianSettings
from splat_slam.slam.frame import Keyframe

logger = get_logger(__name__)


def count_observers(gaussian_map: GaussianMap, window: Sequence[Keyframe]) -> dict[int, int]:
    """Per Gaussian id, the number of window keyframes other than its origin that see it."""
    ids = gaussian_map.creation_order.tolist()
    origin = dict(zip(ids, gaussian_map.origin_keyframe.tolist(), strict=True))
    counts: dict[int, int] = {}
    for keyframe in window:
        for gaussian_id in keyframe.visible:
            if origin.get(gaussian_id, keyframe.keyframe_id) != keyframe.keyframe_id:
                counts[gaussian_id] = counts.get(gaussian_id, 0) + 1
    return counts


def prunable_mask(
    gaussian_map: GaussianMap,
    window_full: bool,
    observers: Mapping[int, int],
    current_kf_id: int,
    settings: GaussianSettings,
) -> NDArray[np.bool_]:
    """Rows to remove under the opacity rule and, once the window is full, the visibility rule."""
    remove = gaussian_map.opacity < settings.prune_opacity
    if window_full:
        recent = gaussian_map.origin_keyframe > current_kf_id - settings.prune_recent_keyframes
        seen = np.array(
            [observers.get(int(i), 0) for i in gaussian_map.creation_order], dtype=np.int64
        )
        remove |= recent & (seen < settings.prune_min_observers)
    return np.asarray(remove, dtype=bool)


def prune(
    gaussian_map: GaussianMap,
    window: Sequence[Keyframe],
    observers: Mapping[int, int],
    current_kf_id: int,
    capacity: int,
    settings: GaussianSettings | None = None,
) -> int:
    """Remove unobserved recent Gaussians and low-opacity ones.

    Args:
        gaussian_map: Map compacted in place.
        window: Current keyframe window W_k.
        observers: Gaussian id to observer count over the window.
        current_kf_id: Id of the keyframe being registered.
        capacity: Window capacity; the visibility rule needs a full window.
        settings: Thresholds (opacity 0.7, 3 observers, last 3 keyframes).

    Returns:
        Number of Gaussians removed.
    """
    settings = settings or GaussianSettings()
    window_full = len(window) >= capacity
    remove = prunable_mask(gaussian_map, window_full, observers, current_kf_id, settings)
    removed = gaussian_map.compact(~remove)
    logger.info(
        "pruned gaussians",
        removed=removed,
        remaining=gaussian_map.count,
        visibility_rule=window_full,
        keyframe=current_kf_id,
    )
    return removed
