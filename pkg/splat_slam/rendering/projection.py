# ---
# entity_id: module-rendering-projection
# entity_name: EWA Splat Projection
# entity_type_id: module
# entity_path: splat_slam/rendering/projection.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-25T09:00:00Z
# entity_exports: [Splat2D, Culled, ProjectedSplats, project_gaussian, project_gaussians]
# entity_dependencies: [numpy]
# entity_callers: [rasterizer, backward]
# entity_callees: [projection_jacobians, quaternion_to_matrix]
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Projection of 3D Gaussians into 2D splats.

Provides:
- project_gaussians: vectorised mu_I = pi(T_CW mu_W), Sigma_I = J W Sigma_W W^T J^T
  with low-pass dilation, conic and 3-sigma radius
- project_gaussian: single-row view returning Splat2D or Culled
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.camera import CameraIntrinsics, projection_jacobians
from splat_slam.geometry.lie import SE3Pose, normalize_quaternions, quaternion_to_matrix
from splat_slam.settings import RendererSettings

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]

# pixels inside the 3-sigma ellipse receive a contribution
FOOTPRINT_MAHALANOBIS_SQ = 9.0


class CullReason(str, Enum):
    BEHIND_CAMERA = "behind_camera"
    OFF_SCREEN = "off_screen"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Culled:
    gaussian_id: int
    reason: CullReason


@dataclass(frozen=True, eq=False)
class Splat2D:
    gaussian_id: int
    mu_i: FloatArray
    cov_i: FloatArray
    conic: FloatArray
    depth_z: float
    radius: float


@dataclass(frozen=True, eq=False)
class ProjectedSplats:
    """Struct-of-arrays over the Gaussians that survived culling.

    rows index the source map; ids are creation_order values. cov_i is the
    dilated image covariance and conic its inverse.
    """

    rows: IntArray
    ids: IntArray
    mean_c: FloatArray
    mu_i: FloatArray
    jacobian: FloatArray
    cov_w: FloatArray
    cov_i: FloatArray
    conic: FloatArray
    depth: FloatArray
    radius: FloatArray
    opacity: FloatArray
    colour: FloatArray
    culled: dict[int, CullReason]

    @property
    def count(self) -> int:
        return int(self.rows.shape[0])

    def depth_order(self) -> IntArray:
        """Indices sorting splats by (depth_z, gaussian id)."""
        return np.lexsort((self.ids, self.depth)).astype(np.int64)


def project_gaussians(
    gaussian_map: GaussianMap,
    pose: SE3Pose,
    K: CameraIntrinsics,
    settings: RendererSettings | None = None,
) -> ProjectedSplats:
    """Project every Gaussian of the map, culling the ones that cannot contribute."""
    settings = settings or RendererSettings()
    W = pose.rotation
    ids_all = gaussian_map.creation_order
    culled: dict[int, CullReason] = {}

    mean_c_all = gaussian_map.mean_w @ W.T + pose.translation
    in_front = mean_c_all[:, 2] > settings.z_near
    for gid in ids_all[~in_front].tolist():
        culled[gid] = CullReason.BEHIND_CAMERA
    rows = np.flatnonzero(in_front).astype(np.int64)

    mean_c = mean_c_all[rows]
    R = quaternion_to_matrix(normalize_quaternions(gaussian_map.rotation_q[rows]))
    M = R * np.exp(gaussian_map.log_scale[rows])[:, None, :]
    cov_w = M @ np.transpose(M, (0, 2, 1))
    J = projection_jacobians(mean_c, K.fx, K.fy)
    T = J @ W
    cov_i = T @ cov_w @ np.transpose(T, (0, 2, 1))
    cov_i = cov_i + settings.dilation * np.eye(2)

    a, b, c = cov_i[:, 0, 0], cov_i[:, 0, 1], cov_i[:, 1, 1]
    det = a * c - b * b
    invertible = np.isfinite(det) & (det > 0.0)
    safe_det = np.where(invertible, det, 1.0)
    conic = np.empty_like(cov_i)
    conic[:, 0, 0] = c / safe_det
    conic[:, 0, 1] = -b / safe_det
    conic[:, 1, 0] = -b / safe_det
    conic[:, 1, 1] = a / safe_det

    half_trace = 0.5 * (a + c)
    lambda_max = half_trace + np.sqrt(np.maximum(0.25 * (a - c) ** 2 + b * b, 0.0))
    radius = 3.0 * np.sqrt(np.maximum(lambda_max, 0.0))

    z = mean_c[:, 2]
    mu_i = np.stack(
        [K.fx * mean_c[:, 0] / z + K.cx, K.fy * mean_c[:, 1] / z + K.cy], axis=-1
    )
    on_screen = (
        (mu_i[:, 0] + radius >= 0.0)
        & (mu_i[:, 0] - radius <= K.width - 1)
        & (mu_i[:, 1] + radius >= 0.0)
        & (mu_i[:, 1] - radius <= K.height - 1)
    )
    ids = ids_all[rows]
    for gid in ids[~invertible].tolist():
        culled[gid] = CullReason.DEGENERATE
    for gid in ids[invertible & ~on_screen].tolist():
        culled[gid] = CullReason.OFF_SCREEN

    keep = invertible & on_screen
    rows = rows[keep]
    return ProjectedSplats(
        rows=rows,
        ids=ids[keep],
        mean_c=mean_c[keep],
        mu_i=mu_i[keep],
        jacobian=J[keep],
        cov_w=cov_w[keep],
        cov_i=cov_i[keep],
        conic=conic[keep],
        depth=z[keep],
        radius=radius[keep],
        opacity=gaussian_map.opacity[rows],
        colour=gaussian_map.colour[rows],
        culled=culled,
    )


def project_gaussian(
    gaussian_map: GaussianMap,
    row: int,
    pose: SE3Pose,
    K: CameraIntrinsics,
    settings: RendererSettings | None = None,
) -> Splat2D | Culled:
    """Project one map row; returns Culled with its reason when it cannot contribute."""
    single = GaussianMap(
        mean_w=gaussian_map.mean_w[row : row + 1],
        log_scale=gaussian_map.log_scale[row : row + 1],
        rotation_q=gaussian_map.rotation_q[row : row + 1],
        opacity_logit=gaussian_map.opacity_logit[row : row + 1],
        colour_logit=gaussian_map.colour_logit[row : row + 1],
        origin_keyframe=gaussian_map.origin_keyframe[row : row + 1],
        creation_order=gaussian_map.creation_order[row : row + 1],
    )
    projected = project_gaussians(single, pose, K, settings)
    gaussian_id = int(single.creation_order[0])
    if projected.count == 0:
        return Culled(gaussian_id, projected.culled[gaussian_id])
    return Splat2D(
        gaussian_id=gaussian_id,
        mu_i=projected.mu_i[0],
        cov_i=projected.cov_i[0],
        conic=projected.conic[0],
        depth_z=float(projected.depth[0]),
        radius=float(projected.radius[0]),
    )
