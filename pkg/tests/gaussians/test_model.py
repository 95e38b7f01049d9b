# ---
# entity_id: test-gaussians-model
# entity_name: Gaussian Map Tests
# entity_type_id: module
# entity_path: tests/gaussians/test_model.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.gaussians, pytest]
# ---

"""Tests for the Gaussian map store."""

import math

import numpy as np
import pytest

from splat_slam.gaussians.model import (
    LOG_SCALE_MAX,
    GaussianMap,
    build_covariance,
    logit,
    sigmoid,
)
from tests.scenes import make_map


class TestCovariance:
    """Tests for Sigma_W = R diag(exp(s))^2 R^T."""

    def test_unit_scale_identity_rotation(self) -> None:
        """Test zero log-scale and identity rotation give the identity."""
        cov = build_covariance(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))
        np.testing.assert_array_equal(cov, np.eye(3))

    def test_scale_is_squared(self) -> None:
        """Test a log-scale of ln 2 on x gives variance 4."""
        cov = build_covariance(np.array([math.log(2.0), 0.0, 0.0]), np.array([1.0, 0, 0, 0]))
        np.testing.assert_allclose(cov, np.diag([4.0, 1.0, 1.0]), atol=1e-14)

    def test_symmetric_positive_definite(self, rng: np.random.Generator) -> None:
        """Test random covariances are symmetric with positive eigenvalues."""
        gaussian_map = make_map(rng, 20)
        covs = gaussian_map.covariances()
        np.testing.assert_allclose(covs, np.transpose(covs, (0, 2, 1)), atol=1e-15)
        assert np.all(np.linalg.eigvalsh(covs) > 0.0)

    def test_unnormalised_quaternion(self) -> None:
        """Test quaternions are normalised before use."""
        q = np.array([2.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(build_covariance(np.zeros(3), q), np.eye(3), atol=1e-15)


class TestGaussianMap:
    """Tests for appending, compaction and snapshots."""

    def test_activations(self) -> None:
        """Test sigmoid inverts logit."""
        p = np.array([0.1, 0.5, 0.9])
        np.testing.assert_allclose(sigmoid(logit(p)), p, atol=1e-15)

    def test_append_assigns_creation_order(self, rng: np.random.Generator) -> None:
        """Test ids continue across appends and the origin keyframe is recorded."""
        gaussian_map = make_map(rng, 3)
        rows = gaussian_map.append(
            np.ones((2, 3)),
            np.zeros((2, 3)),
            np.tile([1.0, 0.0, 0.0, 0.0], (2, 1)),
            np.zeros(2),
            np.zeros((2, 3)),
            origin_keyframe=7,
        )
        assert rows == range(3, 5)
        assert gaussian_map.creation_order.tolist() == [0, 1, 2, 3, 4]
        assert gaussian_map.origin_keyframe.tolist() == [0, 0, 0, 7, 7]
        assert gaussian_map.next_order == 5

    def test_append_clamps_log_scale(self) -> None:
        """Test oversized scales are clamped on insertion."""
        gaussian_map = GaussianMap.empty()
        gaussian_map.append(
            np.zeros((1, 3)),
            np.full((1, 3), 100.0),
            np.array([[1.0, 0.0, 0.0, 0.0]]),
            np.zeros(1),
            np.zeros((1, 3)),
            origin_keyframe=0,
        )
        assert gaussian_map.log_scale.max() == LOG_SCALE_MAX

    def test_compact_preserves_order(self, rng: np.random.Generator) -> None:
        """Test compaction keeps surviving ids sorted and never reuses them."""
        gaussian_map = make_map(rng, 5)
        removed = gaussian_map.compact(np.array([True, False, True, False, True]))
        assert removed == 2
        assert gaussian_map.creation_order.tolist() == [0, 2, 4]
        assert gaussian_map.next_order == 5
        np.testing.assert_array_equal(gaussian_map.rows_for_ids(np.array([2, 4])), [1, 2])

    def test_snapshot_is_independent(self, rng: np.random.Generator) -> None:
        """Test a snapshot does not follow later writes."""
        gaussian_map = make_map(rng, 4)
        snapshot = gaussian_map.snapshot()
        before = snapshot.content_hash()
        gaussian_map.mean_w[0, 0] += 1.0
        assert snapshot.content_hash() == before
        assert gaussian_map.content_hash() != before

    def test_content_hash_is_deterministic(self) -> None:
        """Test equal seeds give equal hashes."""
        first = make_map(np.random.default_rng(3), 10).content_hash()
        second = make_map(np.random.default_rng(3), 10).content_hash()
        assert first == second

    def test_empty_map(self) -> None:
        """Test an empty map has no rows."""
        gaussian_map = GaussianMap.empty(1)
        assert len(gaussian_map) == 0
        assert gaussian_map.covariances().shape == (0, 3, 3)

    @pytest.mark.parametrize("n", [1, 7])
    def test_constrain_normalises(self, rng: np.random.Generator, n: int) -> None:
        """Test constrain renormalises drifted quaternions."""
        gaussian_map = make_map(rng, n)
        gaussian_map.rotation_q *= 3.0
        gaussian_map.constrain()
        np.testing.assert_allclose(np.linalg.norm(gaussian_map.rotation_q, axis=1), 1.0)
