# ---
# entity_id: test-optim-losses
# entity_name: Loss Tests
# entity_type_id: module
# entity_path: tests/optim/test_losses.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.optim, pytest]
# ---

"""Tests for the photometric, geometric and isotropic losses."""

import math

import numpy as np
import pytest

from splat_slam.errors import EmptyMask
from splat_slam.optim.losses import (
    geometric_loss,
    isotropic_loss,
    photometric_loss,
    smoothed_sign,
)
from tests.fd import central_difference


class TestImageLosses:
    """Tests for masked L1 losses."""

    def test_identical_images(self, rng: np.random.Generator) -> None:
        """Test identical images give zero loss and zero gradient."""
        image = rng.uniform(size=(4, 5, 3))
        result = photometric_loss(image, image.copy(), np.ones((4, 5), dtype=bool))
        assert result.value == 0.0
        assert not result.grad.any()

    def test_uniform_offset(self) -> None:
        """Test a uniform 0.1 colour offset gives loss 0.1."""
        observed = np.full((4, 4, 3), 0.2)
        result = photometric_loss(observed + 0.1, observed, np.ones((4, 4), dtype=bool))
        assert result.value == pytest.approx(0.1)
        np.testing.assert_allclose(result.grad, 1.0 / 48.0)

    def test_depth_offset(self) -> None:
        """Test a 5 cm depth offset gives loss 0.05."""
        observed = np.full((3, 3), 2.0)
        result = geometric_loss(observed + 0.05, observed, np.ones((3, 3), dtype=bool))
        assert result.value == pytest.approx(0.05)

    def test_mask_restricts_pixels(self) -> None:
        """Test unmasked pixels neither count nor receive gradient."""
        rendered = np.array([[1.0, 5.0]])
        observed = np.zeros((1, 2))
        mask = np.array([[True, False]])
        result = geometric_loss(rendered, observed, mask)
        assert result.value == 1.0
        assert result.grad.tolist() == [[1.0, 0.0]]

    def test_empty_mask(self) -> None:
        """Test a mask selecting nothing raises EmptyMask."""
        with pytest.raises(EmptyMask):
            geometric_loss(np.ones((2, 2)), np.zeros((2, 2)), np.zeros((2, 2), dtype=bool))

    def test_shape_mismatch(self) -> None:
        """Test mismatched buffers are rejected."""
        with pytest.raises(ValueError):
            photometric_loss(np.ones((2, 2, 3)), np.ones((2, 3, 3)), np.ones((2, 2), dtype=bool))

    def test_smoothed_sign(self) -> None:
        """Test the derivative is linear inside the smoothing band and saturates outside."""
        result = smoothed_sign(np.array([-1.0, -5e-7, 0.0, 5e-7, 1.0]))
        np.testing.assert_allclose(result, [-1.0, -0.5, 0.0, 0.5, 1.0])


class TestIsotropicLoss:
    """Tests for the scale-isotropy regulariser."""

    def test_isotropic_scales(self) -> None:
        """Test equal axes give zero loss."""
        result = isotropic_loss(np.full((4, 3), math.log(0.1)))
        assert result.value == pytest.approx(0.0, abs=1e-15)

    def test_value(self) -> None:
        """Test scales (1, 2, 3) deviate by (1, 0, 1) from their mean."""
        result = isotropic_loss(np.log(np.array([[1.0, 2.0, 3.0]])))
        assert result.value == pytest.approx(2.0)

    def test_empty(self) -> None:
        """Test an empty map has zero regularisation."""
        result = isotropic_loss(np.zeros((0, 3)))
        assert result.value == 0.0
        assert result.grad.shape == (0, 3)

    def test_gradient_matches_finite_differences(self, rng: np.random.Generator) -> None:
        """Test the log-scale gradient away from ties."""
        log_scale = np.log(rng.uniform(0.05, 0.3, size=(5, 3)))
        analytic = isotropic_loss(log_scale).grad
        for index in np.ndindex(log_scale.shape):
            numeric = central_difference(lambda: isotropic_loss(log_scale).value, log_scale, index)
            assert analytic[index] == pytest.approx(numeric, rel=1e-5, abs=1e-9)
