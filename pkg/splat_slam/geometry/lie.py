# ---
# entity_id: module-geometry-lie
# entity_name: SE(3) Lie Geometry
# entity_type_id: module
# entity_path: splat_slam/geometry/lie.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T10:00:00Z
# entity_exports: [SE3Pose, TwistVector, skew, exp_se3, log_se3]
# entity_dependencies: [numpy, scipy]
# entity_callers: [camera, rendering, slam, datasets, evaluation]
# entity_callees: []
# entity_semver_impact: major
# entity_breaking_change_risk: high
# ---

"""
SE(3) arithmetic on world-to-camera poses.

Provides:
- SE3Pose (T_CW) with composition, inversion and quaternion conversion
- TwistVector [rho; theta] and the exp/log maps
- Quaternion (w, x, y, z) to rotation matrix with its derivative

Perturbations are applied on the left: Exp(tau) o T_CW. Every Jacobian in
rendering.backward assumes this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

FloatArray = NDArray[np.float64]

SMALL_ANGLE = 1e-8
# past this angle log() reads the axis off the symmetric part of R
NEAR_PI = math.pi - 1e-3


def skew(v: ArrayLike) -> FloatArray:
    """Skew-symmetric matrix with skew(v) @ w == cross(v, w)."""
    x, y, z = np.asarray(v, dtype=np.float64).reshape(3)
    return np.array(
        [
            [0.0, -z, y],
            [z, 0.0, -x],
            [-y, x, 0.0],
        ]
    )


def vee(S: FloatArray) -> FloatArray:
    """Inverse of skew for the antisymmetric part of S."""
    return np.array([S[2, 1] - S[1, 2], S[0, 2] - S[2, 0], S[1, 0] - S[0, 1]]) * 0.5


@dataclass(frozen=True, eq=False)
class TwistVector:
    """Minimal se(3) increment ordered [rho; theta]."""

    rho: FloatArray = field(default_factory=lambda: np.zeros(3))
    theta: FloatArray = field(default_factory=lambda: np.zeros(3))

    @classmethod
    def from_array(cls, tau: ArrayLike) -> TwistVector:
        values = np.asarray(tau, dtype=np.float64).reshape(6)
        return cls(rho=values[:3].copy(), theta=values[3:].copy())

    def as_array(self) -> FloatArray:
        return np.concatenate([self.rho, self.theta])

    def __neg__(self) -> TwistVector:
        return TwistVector(rho=-self.rho, theta=-self.theta)


@dataclass(frozen=True, eq=False)
class SE3Pose:
    """Rigid transform T_CW mapping world points into the camera frame."""

    rotation: FloatArray = field(default_factory=lambda: np.eye(3))
    translation: FloatArray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rotation = np.array(self.rotation, dtype=np.float64).reshape(3, 3)
        translation = np.array(self.translation, dtype=np.float64).reshape(3)
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> SE3Pose:
        return cls()

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> SE3Pose:
        m = np.asarray(matrix, dtype=np.float64)
        return cls(rotation=m[:3, :3], translation=m[:3, 3])

    @classmethod
    def from_quaternion(cls, q_xyzw: ArrayLike, translation: ArrayLike) -> SE3Pose:
        """Build from a scalar-last quaternion, as stored in trajectory files."""
        rotation = Rotation.from_quat(np.asarray(q_xyzw, dtype=np.float64)).as_matrix()
        return cls(rotation=rotation, translation=translation)

    def matrix(self) -> FloatArray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def compose(self, other: SE3Pose) -> SE3Pose:
        """self o other (apply other first)."""
        return SE3Pose(
            rotation=self.rotation @ other.rotation,
            translation=self.rotation @ other.translation + self.translation,
        )

    def __matmul__(self, other: SE3Pose) -> SE3Pose:
        return self.compose(other)

    def inverse(self) -> SE3Pose:
        rt = self.rotation.T
        return SE3Pose(rotation=rt, translation=-rt @ self.translation)

    def apply(self, points: ArrayLike) -> FloatArray:
        """Transform (3,) or (N, 3) points."""
        p = np.asarray(points, dtype=np.float64)
        return p @ self.rotation.T + self.translation

    def camera_center(self) -> FloatArray:
        """Camera position in world coordinates."""
        return -self.rotation.T @ self.translation

    def quaternion_xyzw(self) -> FloatArray:
        """Canonical (w >= 0) scalar-last quaternion of the rotation."""
        return np.asarray(Rotation.from_matrix(self.rotation).as_quat(canonical=True))

    def allclose(self, other: SE3Pose, atol: float = 1e-9) -> bool:
        return bool(
            np.allclose(self.rotation, other.rotation, atol=atol)
            and np.allclose(self.translation, other.translation, atol=atol)
        )


def _so3_coefficients(phi: float) -> tuple[float, float, float]:
    """sin(phi)/phi, (1 - cos phi)/phi^2, (phi - sin phi)/phi^3."""
    if phi < SMALL_ANGLE:
        return 1.0 - phi * phi / 6.0, 0.5 - phi * phi / 24.0, 1.0 / 6.0 - phi * phi / 120.0
    s, c = math.sin(phi), math.cos(phi)
    return s / phi, (1.0 - c) / (phi * phi), (phi - s) / (phi**3)


def exp_so3(theta: ArrayLike) -> FloatArray:
    theta = np.asarray(theta, dtype=np.float64).reshape(3)
    phi = float(np.linalg.norm(theta))
    K = skew(theta)
    a, b, _ = _so3_coefficients(phi)
    return np.eye(3) + a * K + b * (K @ K)


def left_jacobian_so3(theta: ArrayLike) -> FloatArray:
    """V(theta) mapping rho onto the translation of Exp([rho; theta])."""
    theta = np.asarray(theta, dtype=np.float64).reshape(3)
    phi = float(np.linalg.norm(theta))
    K = skew(theta)
    _, b, c = _so3_coefficients(phi)
    return np.eye(3) + b * K + c * (K @ K)


def exp_se3(tau: TwistVector | ArrayLike) -> SE3Pose:
    """Exponential map se(3) -> SE(3)."""
    twist = tau if isinstance(tau, TwistVector) else TwistVector.from_array(tau)
    rotation = exp_so3(twist.theta)
    translation = left_jacobian_so3(twist.theta) @ twist.rho
    return SE3Pose(rotation=rotation, translation=translation)


def log_so3(R: FloatArray) -> FloatArray:
    cos_phi = float(np.clip((np.trace(R) - 1.0) * 0.5, -1.0, 1.0))
    axis_sin = vee(R)
    sin_phi = float(np.linalg.norm(axis_sin))
    phi = math.atan2(sin_phi, cos_phi)

    if phi < SMALL_ANGLE:
        # R ~ I + K + K^2/2, whose antisymmetric part is K itself
        return axis_sin

    if phi > NEAR_PI:
        # (R + R^T)/2 - cos(phi) I = (1 - cos phi) a a^T
        S = (R + R.T) * 0.5 - cos_phi * np.eye(3)
        column = S[:, int(np.argmax(np.diag(S)))]
        axis = column / np.linalg.norm(column)
        if float(axis @ axis_sin) < 0.0:
            axis = -axis
        return axis * phi

    return axis_sin * (phi / sin_phi)


def log_se3(T: SE3Pose) -> TwistVector:
    """Logarithm map SE(3) -> se(3), inverse of exp_se3 for |theta| < pi."""
    theta = log_so3(T.rotation)
    phi = float(np.linalg.norm(theta))
    K = skew(theta)
    if phi < SMALL_ANGLE:
        v_inv = np.eye(3) - 0.5 * K + (K @ K) / 12.0
    else:
        coefficient = (1.0 - phi * math.sin(phi) / (2.0 * (1.0 - math.cos(phi)))) / (phi * phi)
        v_inv = np.eye(3) - 0.5 * K + coefficient * (K @ K)
    return TwistVector(rho=v_inv @ T.translation, theta=theta)


def normalize_quaternions(q: FloatArray) -> FloatArray:
    """Unit-normalise (..., 4) quaternions."""
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quaternion_to_matrix(q: FloatArray) -> FloatArray:
    """Rotation matrices (N, 3, 3) from unit quaternions (N, 4) stored (w, x, y, z)."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    R = np.empty((q.shape[0], 3, 3))
    R[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    R[:, 0, 1] = 2.0 * (x * y - w * z)
    R[:, 0, 2] = 2.0 * (x * z + w * y)
    R[:, 1, 0] = 2.0 * (x * y + w * z)
    R[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    R[:, 1, 2] = 2.0 * (y * z - w * x)
    R[:, 2, 0] = 2.0 * (x * z - w * y)
    R[:, 2, 1] = 2.0 * (y * z + w * x)
    R[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return R


def quaternion_matrix_jacobian(q: FloatArray) -> FloatArray:
    """dR/dq as (N, 4, 3, 3) for quaternions stored (w, x, y, z)."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    zero = np.zeros_like(w)
    dw = np.stack(
        [
            np.stack([zero, -z, y], -1),
            np.stack([z, zero, -x], -1),
            np.stack([-y, x, zero], -1),
        ],
        axis=-2,
    )
    dx = np.stack(
        [
            np.stack([zero, y, z], -1),
            np.stack([y, -2.0 * x, -w], -1),
            np.stack([z, w, -2.0 * x], -1),
        ],
        axis=-2,
    )
    dy = np.stack(
        [
            np.stack([-2.0 * y, x, w], -1),
            np.stack([x, zero, z], -1),
            np.stack([-w, z, -2.0 * y], -1),
        ],
        axis=-2,
    )
    dz = np.stack(
        [
            np.stack([-2.0 * z, -w, x], -1),
            np.stack([w, -2.0 * z, y], -1),
            np.stack([x, y, zero], -1),
        ],
        axis=-2,
    )
    return 2.0 * np.stack([dw, dx, dy, dz], axis=1)


def rotation_angle_between(a: SE3Pose, b: SE3Pose) -> float:
    """Geodesic angle in radians between the rotations of two poses."""
    return float(np.linalg.norm(log_so3(a.rotation @ b.rotation.T)))
