# ---
# entity_id: test-evaluation-ate
# entity_name: ATE Tests
# entity_type_id: module
# entity_path: tests/evaluation/test_ate.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.evaluation, scipy, pytest]
# ---

"""
Tests for trajectory alignment and ATE RMSE.

Test coverage:
- Zero error for identical, rigidly moved and (with scale) rescaled copies
- Agreement with a brute-force numerical minimiser
- Degenerate and mismatched inputs
- Timestamp matching
"""

import numpy as np
import pytest
from numpy.typing import NDArray
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from splat_slam.errors import DegenerateGeometry, LengthMismatch
from splat_slam.evaluation.ate import ate_rmse, match_trajectories, umeyama_alignment
from splat_slam.geometry.lie import SE3Pose, exp_se3


def _trajectory(centres: NDArray[np.float64], rng: np.random.Generator) -> list[SE3Pose]:
    poses = []
    for centre in centres:
        rotation = exp_se3(np.concatenate([np.zeros(3), rng.normal(0.0, 0.3, 3)])).rotation
        poses.append(SE3Pose(rotation=rotation, translation=-rotation @ centre))
    return poses


@pytest.fixture
def reference(rng: np.random.Generator) -> list[SE3Pose]:
    return _trajectory(rng.uniform(-1.0, 1.0, size=(20, 3)), rng)


class TestAteRmse:
    """Tests for aligned position error."""

    def test_identical(self, reference: list[SE3Pose]) -> None:
        """Test a trajectory against itself scores zero."""
        report = ate_rmse(reference, reference)
        assert report.rmse == pytest.approx(0.0, abs=1e-9)
        assert report.count == 20
        assert not report.scale_aligned

    def test_rigid_copy(self, reference: list[SE3Pose]) -> None:
        """Test a rigidly moved copy aligns back to zero error."""
        world = exp_se3([0.5, -1.0, 2.0, 0.3, -0.2, 0.9])
        moved = [pose @ world.inverse() for pose in reference]
        report = ate_rmse(moved, reference)
        assert report.rmse == pytest.approx(0.0, abs=1e-9)

    def test_scaled_copy(self, reference: list[SE3Pose], rng: np.random.Generator) -> None:
        """Test a 2x scaled copy needs similarity alignment to score zero."""
        centres = np.array([pose.camera_center() for pose in reference])
        scaled = _trajectory(2.0 * centres, rng)
        report = ate_rmse(scaled, reference, with_scale=True)
        assert report.rmse == pytest.approx(0.0, abs=1e-9)
        assert report.scale == pytest.approx(0.5)
        assert report.scale_aligned
        assert ate_rmse(scaled, reference).rmse > 0.1

    def test_ignores_orientation(self, reference: list[SE3Pose], rng: np.random.Generator) -> None:
        """Test only camera positions enter the error."""
        centres = np.array([pose.camera_center() for pose in reference])
        reoriented = _trajectory(centres, rng)
        assert ate_rmse(reoriented, reference).rmse == pytest.approx(0.0, abs=1e-9)

    def test_matches_numerical_minimum(self, rng: np.random.Generator) -> None:
        """Test the closed form is no worse than BFGS over rotation and translation."""
        target = rng.uniform(-1.0, 1.0, size=(30, 3))
        true_rotation = Rotation.from_rotvec([0.1, -0.05, 0.08])
        source = true_rotation.inv().apply(target - 0.2) + rng.normal(0.0, 0.01, (30, 3))

        def cost(params: NDArray[np.float64]) -> float:
            moved = Rotation.from_rotvec(params[:3]).apply(source) + params[3:]
            return float(np.sqrt(np.mean(np.sum((moved - target) ** 2, axis=1))))

        brute = minimize(cost, np.zeros(6), method="BFGS", options={"gtol": 1e-10})
        alignment = umeyama_alignment(source, target, with_scale=False)
        closed = float(
            np.sqrt(np.mean(np.sum((alignment.apply(source) - target) ** 2, axis=1)))
        )
        assert closed <= brute.fun + 1e-9
        assert closed == pytest.approx(brute.fun, abs=1e-6)
        np.testing.assert_allclose(np.linalg.det(alignment.rotation), 1.0)

    def test_degenerate(self) -> None:
        """Test coincident estimated positions raise DegenerateGeometry."""
        still = [SE3Pose.identity()] * 3
        moving = [SE3Pose(translation=np.array([float(i), 0.0, 0.0])) for i in range(3)]
        with pytest.raises(DegenerateGeometry):
            ate_rmse(still, moving)

    def test_length_mismatch(self, reference: list[SE3Pose]) -> None:
        """Test unequal or too short inputs raise LengthMismatch."""
        with pytest.raises(LengthMismatch):
            ate_rmse(reference[:3], reference[:4])
        with pytest.raises(LengthMismatch):
            ate_rmse(reference[:1], reference[:1])


class TestMatchTrajectories:
    """Tests for pairing estimates with ground truth by timestamp."""

    def test_nearest_within_tolerance(self, reference: list[SE3Pose]) -> None:
        """Test estimates pair with reference stamps less than 20 ms away."""
        estimated = ([0.0, 1.0, 2.0], reference[:3])
        truth = ([0.005, 1.5, 2.01], reference[3:6])
        times, est, ref = match_trajectories(estimated, truth)
        assert times == [0.0, 2.0]
        assert est == [reference[0], reference[2]]
        assert ref == [reference[3], reference[5]]
