# ---
# entity_id: module-evaluation-ate
# entity_name: Absolute Trajectory Error
# entity_type_id: module
# entity_path: splat_slam/evaluation/ate.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T09:00:00Z
# entity_exports: [umeyama_alignment, ate_rmse, match_trajectories]
# entity_dependencies: [numpy]
# entity_callers: [cli]
# entity_callees: [associate]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
ATE RMSE of camera positions after closed-form least-squares alignment.

The estimated positions are mapped onto the reference with the rigid
(or, for monocular runs, similarity) transform minimising the squared
residuals; only translations enter the error.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from splat_slam.datasets.tum import associate
from splat_slam.errors import DegenerateGeometry, LengthMismatch
from splat_slam.geometry.lie import SE3Pose
from splat_slam.models import AteReport

FloatArray = NDArray[np.float64]

# squared spread below which the estimated positions count as one point
DEGENERATE_VARIANCE = 1e-18


class Alignment(NamedTuple):
    rotation: FloatArray
    translation: FloatArray
    scale: float

    def apply(self, points: FloatArray) -> FloatArray:
        return self.scale * points @ self.rotation.T + self.translation


def umeyama_alignment(source: FloatArray, target: FloatArray, with_scale: bool) -> Alignment:
    """Least-squares s, R, t with target ~ s R source + t.

    Raises:
        DegenerateGeometry: all source points coincide.
    """
    mu_s = source.mean(axis=0)
    mu_t = target.mean(axis=0)
    x = source - mu_s
    y = target - mu_t
    variance = float(np.mean(np.sum(x * x, axis=1)))
    if variance < DEGENERATE_VARIANCE:
        raise DegenerateGeometry("estimated positions all coincide")
    covariance = y.T @ x / source.shape[0]
    U, D, Vt = np.linalg.svd(covariance)
    S = np.eye(3)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0.0:
        S[2, 2] = -1.0
    R = U @ S @ Vt
    scale = float(np.trace(np.diag(D) @ S) / variance) if with_scale else 1.0
    return Alignment(R, mu_t - scale * R @ mu_s, scale)


def ate_rmse(
    estimated: Sequence[SE3Pose], reference: Sequence[SE3Pose], with_scale: bool = False
) -> AteReport:
    """Align index-matched trajectories and report the RMSE of position residuals.

    Raises:
        LengthMismatch: the trajectories differ in length or hold fewer than two poses.
        DegenerateGeometry: every estimated position is the same point.
    """
    if len(estimated) != len(reference):
        raise LengthMismatch(f"{len(estimated)} estimated poses vs {len(reference)} reference")
    if len(estimated) < 2:
        raise LengthMismatch("need at least two poses")
    source = np.array([pose.camera_center() for pose in estimated])
    target = np.array([pose.camera_center() for pose in reference])
    alignment = umeyama_alignment(source, target, with_scale)
    errors = np.linalg.norm(alignment.apply(source) - target, axis=1)
    return AteReport(
        rmse=float(np.sqrt(np.mean(errors**2))),
        errors=errors.tolist(),
        rotation=alignment.rotation.tolist(),
        translation=alignment.translation.tolist(),
        scale=alignment.scale,
        scale_aligned=with_scale,
    )


def match_trajectories(
    estimated: tuple[Sequence[float], Sequence[SE3Pose]],
    reference: tuple[Sequence[float], Sequence[SE3Pose]],
    max_difference: float = 0.02,
) -> tuple[list[float], list[SE3Pose], list[SE3Pose]]:
    """Pair poses by nearest timestamp.

    Returns:
        Matched timestamps of the estimate, estimated poses and reference poses.
    """
    est_times, est_poses = estimated
    ref_times, ref_poses = reference
    matches = associate(est_times, ref_times, max_difference)
    kept = sorted(matches)
    return (
        [est_times[i] for i in kept],
        [est_poses[i] for i in kept],
        [ref_poses[matches[i]] for i in kept],
    )
