# ---
# entity_id: test-slam-keyframes
# entity_name: Keyframe Management Tests
# entity_type_id: module
# entity_path: tests/slam/test_keyframes.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.slam, pytest]
# ---

"""
Tests for covisibility, keyframe registration and the window.

Test coverage:
- IOU and overlap coefficient
- Covisibility and baseline registration with preset thresholds
- Window eviction by overlap coefficient
- Random past keyframe sampling
"""

import numpy as np
import pytest
from scipy import stats

from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.settings import PRESETS, KeyframeSettings
from splat_slam.slam.frame import Frame, Keyframe
from splat_slam.slam.keyframes import (
    FrameStats,
    KeyframeWindow,
    RegistrationReason,
    covisibility,
    maintain_window,
    sample_random_past,
    should_register,
)

_K = CameraIntrinsics(fx=1.0, fy=1.0, cx=0.5, cy=0.5, width=2, height=2)


def _keyframe(keyframe_id: int, visible: set[int]) -> Keyframe:
    frame = Frame(keyframe_id, float(keyframe_id), np.zeros((2, 2, 3)), _K)
    return Keyframe(keyframe_id, frame, SE3Pose(), visible=frozenset(visible))


@pytest.fixture
def replica() -> KeyframeSettings:
    return KeyframeSettings(**PRESETS["replica"]["keyframes"])


class TestCovisibility:
    """Tests for set overlap measures."""

    def test_identical(self) -> None:
        """Test identical sets give (1, 1)."""
        assert covisibility({1, 2}, {1, 2}) == (1.0, 1.0)

    def test_partial_overlap(self) -> None:
        """Test {1,2,3} vs {2,3,4} gives (0.5, 2/3)."""
        result = covisibility({1, 2, 3}, {2, 3, 4})
        assert result.iou == pytest.approx(0.5)
        assert result.oc == pytest.approx(2.0 / 3.0)

    def test_disjoint(self) -> None:
        """Test disjoint sets give (0, 0)."""
        assert covisibility({1}, {2}) == (0.0, 0.0)

    def test_both_empty(self) -> None:
        """Test two empty sets give (0, 0)."""
        assert covisibility(set(), set()) == (0.0, 0.0)


class TestShouldRegister:
    """Tests for the keyframe decision with Replica thresholds."""

    @staticmethod
    def _views(iou: float, shift: float) -> tuple[FrameStats, FrameStats]:
        # 100 shared ids out of n_union gives IOU = 100 / n_union
        n_union = round(100 / iou)
        last = FrameStats(frozenset(range(100)), SE3Pose(), 1.0)
        current = FrameStats(
            frozenset(range(n_union)), SE3Pose(translation=np.array([-shift, 0.0, 0.0])), 1.0
        )
        return current, last

    def test_high_overlap_small_motion(self, replica: KeyframeSettings) -> None:
        """Test IOU 0.96 and a 1 cm move at unit depth do not register."""
        current, last = self._views(100 / 104, 0.01)
        decision = should_register(current, last, replica)
        assert decision.iou > 0.95
        assert not decision.register
        assert decision.reason is RegistrationReason.NONE

    def test_low_overlap(self, replica: KeyframeSettings) -> None:
        """Test IOU 0.94 registers for covisibility."""
        current, last = self._views(100 / 106, 0.0)
        decision = should_register(current, last, replica)
        assert decision.iou < 0.95
        assert decision.register
        assert decision.reason is RegistrationReason.COVISIBILITY

    def test_baseline(self, replica: KeyframeSettings) -> None:
        """Test a 5 cm move at 1 m depth registers for baseline."""
        current, last = self._views(1.0, 0.05)
        decision = should_register(current, last, replica)
        assert decision.register
        assert decision.reason is RegistrationReason.BASELINE
        assert decision.baseline == pytest.approx(0.05)

    def test_monotone_in_baseline(self, replica: KeyframeSettings) -> None:
        """Test a larger move never turns a registration off."""
        flags = [should_register(*self._views(1.0, s), replica).register for s in (0.03, 0.05, 0.5)]
        assert flags == sorted(flags)


class TestMaintainWindow:
    """Tests for window eviction."""

    def test_no_eviction(self) -> None:
        """Test overlapping keyframes under capacity are all kept."""
        window = KeyframeWindow(capacity=5, entries=[_keyframe(0, {1, 2}), _keyframe(1, {1, 2})])
        assert maintain_window(window, _keyframe(2, {1, 2, 3})) == []
        assert window.ids() == [0, 1, 2]

    def test_low_overlap_evicted(self) -> None:
        """Test an entry with OC 0.2 is evicted."""
        low = _keyframe(0, {1, 2, 3, 4, 5})
        window = KeyframeWindow(capacity=5, entries=[low, _keyframe(1, set(range(5, 10)))])
        # OC(new, low) = |{5}| / 5 = 0.2
        new = _keyframe(2, set(range(5, 10)))
        assert maintain_window(window, new) == [0]
        assert window.ids() == [1, 2]

    def test_over_capacity_evicts_minimum_overlap(self) -> None:
        """Test one eviction, the entry with the lowest overlap coefficient."""
        entries = [
            _keyframe(0, {1, 2, 3, 4}),
            _keyframe(1, {1, 2, 8, 9}),
            _keyframe(2, {1, 2, 3, 9}),
        ]
        window = KeyframeWindow(capacity=3, entries=entries)
        evicted = maintain_window(window, _keyframe(3, {1, 2, 3, 4}))
        assert evicted == [1]
        assert window.ids() == [0, 2, 3]
        assert window.latest.keyframe_id == 3

    def test_ties_evict_oldest(self) -> None:
        """Test equal overlap removes the oldest entry."""
        entries = [_keyframe(i, {1, 2}) for i in range(3)]
        window = KeyframeWindow(capacity=3, entries=entries)
        assert maintain_window(window, _keyframe(3, {1, 2})) == [0]
        assert window.oldest.keyframe_id == 1


class TestSampleRandomPast:
    """Tests for W_r selection outside the window."""

    def test_nothing_outside(self) -> None:
        """Test an empty selection when every keyframe is in the window."""
        window = KeyframeWindow(capacity=3, entries=[_keyframe(0, set())])
        assert sample_random_past([0], window, np.random.default_rng(0)) == []

    def test_exactly_two_outside(self) -> None:
        """Test both outside keyframes are selected."""
        window = KeyframeWindow(capacity=3, entries=[_keyframe(2, set())])
        assert sample_random_past([0, 1, 2], window, np.random.default_rng(0)) == [0, 1]

    def test_reproducible(self) -> None:
        """Test a fixed seed gives the same pair."""
        window = KeyframeWindow(capacity=3, entries=[_keyframe(100, set())])
        ids = list(range(101))
        first = sample_random_past(ids, window, np.random.default_rng(42))
        second = sample_random_past(ids, window, np.random.default_rng(42))
        assert first == second
        assert len(set(first)) == 2
        assert 100 not in first

    def test_uniform(self) -> None:
        """Test selection frequencies over 10^4 draws are consistent with uniform."""
        window = KeyframeWindow(capacity=3, entries=[_keyframe(100, set())])
        ids = list(range(101))
        rng = np.random.default_rng(7)
        counts = np.zeros(100)
        draws = 10_000
        for _ in range(draws):
            for kf_id in sample_random_past(ids, window, rng):
                counts[kf_id] += 1
        assert counts.sum() == 2 * draws
        assert stats.chisquare(counts).pvalue > 1e-3
