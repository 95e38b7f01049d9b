"""SE(3) geometry and the pinhole camera model."""

from splat_slam.geometry.camera import (
    EPSILON_Z,
    CameraIntrinsics,
    backproject,
    project,
    projection_jacobian,
)
from splat_slam.geometry.lie import SE3Pose, TwistVector, exp_se3, log_se3, skew

__all__ = [
    "EPSILON_Z",
    "CameraIntrinsics",
    "SE3Pose",
    "TwistVector",
    "backproject",
    "exp_se3",
    "log_se3",
    "project",
    "projection_jacobian",
    "skew",
]
