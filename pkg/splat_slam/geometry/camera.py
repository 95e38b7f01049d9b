# ---
# entity_id: module-geometry-camera
# entity_name: Pinhole Camera
# entity_type_id: module
# entity_path: splat_slam/geometry/camera.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T10:00:00Z
# entity_exports: [CameraIntrinsics, project, projection_jacobian, backproject]
# entity_dependencies: [numpy, pydantic]
# entity_callers: [rendering, gaussians, datasets]
# entity_callees: []
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Pinhole intrinsics and the projection pi used by splatting.

Pixel (u, v) has its centre at image-plane coordinate (u, v).
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from splat_slam.errors import NonPositiveDepth

FloatArray = NDArray[np.float64]

EPSILON_Z = 1e-6


class CameraIntrinsics(BaseModel):
    """Focal lengths, principal point and image size, all in pixels."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    fx: float = Field(gt=0.0)
    fy: float = Field(gt=0.0)
    cx: float = Field(ge=0.0)
    cy: float = Field(ge=0.0)
    width: int = Field(gt=0)
    height: int = Field(gt=0)

    @model_validator(mode="after")
    def _principal_point_inside(self) -> CameraIntrinsics:
        if self.cx >= self.width or self.cy >= self.height:
            raise ValueError(
                f"principal point ({self.cx}, {self.cy}) outside {self.width}x{self.height}"
            )
        return self

    def matrix(self) -> FloatArray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def downscaled(self, factor: int) -> CameraIntrinsics:
        """Intrinsics of an image subsampled with stride `factor`."""
        return CameraIntrinsics(
            fx=self.fx / factor,
            fy=self.fy / factor,
            cx=self.cx / factor,
            cy=self.cy / factor,
            width=-(-self.width // factor),
            height=-(-self.height // factor),
        )


def _checked_point(mu_c: ArrayLike) -> FloatArray:
    point = np.asarray(mu_c, dtype=np.float64).reshape(3)
    if not point[2] > EPSILON_Z:
        raise NonPositiveDepth(float(point[2]))
    return point


def project(mu_c: ArrayLike, K: CameraIntrinsics) -> FloatArray:
    """Pixel coordinates (fx x/z + cx, fy y/z + cy) of a camera-frame point."""
    x, y, z = _checked_point(mu_c)
    return np.array([K.fx * x / z + K.cx, K.fy * y / z + K.cy])


def projection_jacobian(mu_c: ArrayLike, K: CameraIntrinsics) -> FloatArray:
    """2x3 derivative of project with respect to the camera-frame point."""
    x, y, z = _checked_point(mu_c)
    return np.array(
        [
            [K.fx / z, 0.0, -K.fx * x / (z * z)],
            [0.0, K.fy / z, -K.fy * y / (z * z)],
        ]
    )


def projection_jacobians(mu_c: FloatArray, fx: float, fy: float) -> FloatArray:
    """Batched projection_jacobian for (N, 3) points with z > 0, no depth check."""
    x, y, z = mu_c[:, 0], mu_c[:, 1], mu_c[:, 2]
    inv_z = 1.0 / z
    J = np.zeros((mu_c.shape[0], 2, 3))
    J[:, 0, 0] = fx * inv_z
    J[:, 0, 2] = -fx * x * inv_z * inv_z
    J[:, 1, 1] = fy * inv_z
    J[:, 1, 2] = -fy * y * inv_z * inv_z
    return J


def projection_jacobian_derivatives(mu_c: FloatArray, fx: float, fy: float) -> FloatArray:
    """dJ[a, b]/dmu_C[c] as (N, 2, 3, 3)."""
    x, y, z = mu_c[:, 0], mu_c[:, 1], mu_c[:, 2]
    inv_z2 = 1.0 / (z * z)
    inv_z3 = inv_z2 / z
    dJ = np.zeros((mu_c.shape[0], 2, 3, 3))
    dJ[:, 0, 0, 2] = -fx * inv_z2
    dJ[:, 0, 2, 0] = -fx * inv_z2
    dJ[:, 0, 2, 2] = 2.0 * fx * x * inv_z3
    dJ[:, 1, 1, 2] = -fy * inv_z2
    dJ[:, 1, 2, 1] = -fy * inv_z2
    dJ[:, 1, 2, 2] = 2.0 * fy * y * inv_z3
    return dJ


def backproject(u: FloatArray, v: FloatArray, z: FloatArray, K: CameraIntrinsics) -> FloatArray:
    """Camera-frame points z K^-1 (u, v, 1) as (N, 3)."""
    return np.stack([(u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z], axis=-1)
