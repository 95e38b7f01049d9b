# ---
# entity_id: test-optim-adam
# entity_name: Optimizer Tests
# entity_type_id: module
# entity_path: tests/optim/test_adam.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.optim, pytest]
# ---

"""Tests for Adam steps over parameter groups, poses and exposure."""

import numpy as np
import pytest

from splat_slam.errors import ShapeMismatch
from splat_slam.geometry.lie import SE3Pose
from splat_slam.optim.adam import (
    ExposureOptimizer,
    GaussianOptimizer,
    OptimizerState,
    PoseOptimizer,
    step,
)
from splat_slam.rendering.backward import GradientBuffers
from splat_slam.settings import OptimizerSettings
from splat_slam.slam.frame import Exposure
from tests.scenes import make_map


class TestStep:
    """Tests for the generic Adam step."""

    def test_zero_gradient_leaves_parameters(self) -> None:
        """Test a zero gradient produces a zero update."""
        state = OptimizerState(learning_rates={"x": 0.1})
        params = {"x": np.array([1.0, -2.0])}
        updated = step(state, params, {"x": np.zeros(2)})
        np.testing.assert_array_equal(updated["x"], params["x"])

    def test_first_step_moves_by_learning_rate(self) -> None:
        """Test the bias-corrected first step is lr times the gradient sign."""
        state = OptimizerState(learning_rates={"x": 0.1})
        updated = step(state, {"x": np.array([1.0, 1.0])}, {"x": np.array([2.0, -3.0])})
        np.testing.assert_allclose(updated["x"], [0.9, 1.1], atol=1e-8)
        assert state.step_count == 1

    def test_shape_mismatch(self) -> None:
        """Test a gradient of the wrong shape is rejected."""
        state = OptimizerState(learning_rates={"x": 0.1})
        with pytest.raises(ShapeMismatch):
            step(state, {"x": np.zeros(3)}, {"x": np.zeros(2)})

    def test_stale_moments_rejected(self) -> None:
        """Test moments of another size are rejected."""
        state = OptimizerState(learning_rates={"x": 0.1})
        step(state, {"x": np.zeros(3)}, {"x": np.ones(3)})
        with pytest.raises(ShapeMismatch):
            step(state, {"x": np.zeros(2)}, {"x": np.ones(2)})


class TestGaussianOptimizer:
    """Tests for keeping moments aligned with the map."""

    def test_moments_follow_pruning_and_insertion(self, rng: np.random.Generator) -> None:
        """Test survivors keep their moments and new Gaussians start at zero."""
        gaussian_map = make_map(rng, 3)
        optimizer = GaussianOptimizer(OptimizerSettings())
        grads = GradientBuffers.zeros(3)
        grads.d_opacity_logit[:] = [1.0, 2.0, 3.0]
        optimizer.step(gaussian_map, grads)
        moments = optimizer.state.first_moment["opacity_logit"].copy()

        gaussian_map.compact(np.array([True, False, True]))
        gaussian_map.append(
            np.ones((1, 3)),
            np.zeros((1, 3)),
            np.array([[1.0, 0.0, 0.0, 0.0]]),
            np.zeros(1),
            np.zeros((1, 3)),
            origin_keyframe=1,
        )
        optimizer.sync(gaussian_map)
        synced = optimizer.state.first_moment["opacity_logit"]
        np.testing.assert_array_equal(synced, [moments[0], moments[2], 0.0])

    def test_step_updates_map_in_place(self, rng: np.random.Generator) -> None:
        """Test the map moves against the gradient and stays normalised."""
        gaussian_map = make_map(rng, 2)
        before = gaussian_map.mean_w.copy()
        grads = GradientBuffers.zeros(2)
        grads.d_mean_w[:, 0] = 1.0
        grads.d_rotation_q[:, 1] = 1.0
        optimizer = GaussianOptimizer(OptimizerSettings())
        optimizer.step(gaussian_map, grads)
        assert np.all(gaussian_map.mean_w[:, 0] < before[:, 0])
        np.testing.assert_array_equal(gaussian_map.mean_w[:, 1:], before[:, 1:])
        np.testing.assert_allclose(np.linalg.norm(gaussian_map.rotation_q, axis=1), 1.0)

    def test_monocular_position_rate(self) -> None:
        """Test monocular runs scale the position learning rate."""
        settings = OptimizerSettings()
        optimizer = GaussianOptimizer(settings, monocular=True)
        expected = settings.lr_position * settings.monocular_position_factor
        assert optimizer.state.learning_rates["mean_w"] == pytest.approx(expected)


class TestPoseAndExposure:
    """Tests for the camera-side optimizers."""

    def test_pose_step_retracts_on_the_left(self) -> None:
        """Test a positive x gradient moves the translation by -lr."""
        optimizer = PoseOptimizer(OptimizerSettings())
        pose, norm = optimizer.step(SE3Pose(), np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(pose.translation, [-0.001, 0.0, 0.0], atol=1e-10)
        np.testing.assert_allclose(pose.rotation, np.eye(3), atol=1e-15)
        assert norm == pytest.approx(0.001, rel=1e-6)

    def test_pose_zero_gradient(self) -> None:
        """Test a zero gradient keeps the pose and reports a zero step."""
        optimizer = PoseOptimizer(OptimizerSettings())
        start = SE3Pose(translation=np.array([0.1, 0.2, 0.3]))
        pose, norm = optimizer.step(start, np.zeros(6))
        assert pose.allclose(start, atol=0.0)
        assert norm == 0.0

    def test_pose_shape(self) -> None:
        """Test the twist gradient must be a 6-vector."""
        with pytest.raises(ShapeMismatch):
            PoseOptimizer(OptimizerSettings()).step(SE3Pose(), np.zeros(3))

    def test_exposure_step(self) -> None:
        """Test exposure moves against its gradient."""
        optimizer = ExposureOptimizer(OptimizerSettings())
        exposure = optimizer.step(Exposure(), np.array([1.0, -1.0]))
        assert exposure.a == pytest.approx(-0.01, rel=1e-6)
        assert exposure.b == pytest.approx(0.01, rel=1e-6)
