# ---
# entity_id: module-rendering-backward
# entity_name: Splat Gradients
# entity_type_id: module
# entity_path: splat_slam/rendering/backward.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-25T14:00:00Z
# entity_exports: [GradientBuffers, backward, d_meanC_d_pose, d_W_d_pose]
# entity_dependencies: [numpy]
# entity_callers: [tracker, mapper, funnel]
# entity_callees: [splat_alpha, quaternion_matrix_jacobian, projection_jacobian_derivatives]
# entity_semver_impact: major
# entity_breaking_change_risk: high
# ---

"""
Analytic backward pass of the rasterizer.

Provides:
- GradientBuffers: dL for every Gaussian parameter, the camera twist
  [rho; theta] and the exposure (a, b)
- d_meanC_d_pose, d_W_d_pose: pose Jacobian blocks under Exp(tau) o T_CW
- backward: per-pixel replay of the blending, chained through the EWA
  projection into world-space parameters and the camera twist

Per contributor i of a pixel, with suffix S_i = sum_{j>i} v_j alpha_j T_j:
    dL/dalpha_i = v_i T_i - S_i / (1 - alpha_i)
where v_i = c_i . dL/dC (+ z_i dL/dD). Image-space gradients of the mean
and the dilated covariance are then pushed through Sigma_I = J W Sigma_W W^T J^T
and mu_I = pi(mu_C), including the dependence of J on mu_C.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from splat_slam.errors import MissingContributors
from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.camera import projection_jacobian_derivatives
from splat_slam.geometry.lie import (
    normalize_quaternions,
    quaternion_matrix_jacobian,
    quaternion_to_matrix,
    skew,
)
from splat_slam.rendering.rasterizer import RenderOutput, TileRecord, splat_alpha
from splat_slam.settings import RendererSettings

FloatArray = NDArray[np.float64]


@dataclass(eq=False)
class GradientBuffers:
    d_mean_w: FloatArray
    d_log_scale: FloatArray
    d_rotation_q: FloatArray
    d_opacity_logit: FloatArray
    d_colour: FloatArray
    d_camera_twist: FloatArray = field(default_factory=lambda: np.zeros(6))
    d_exposure: FloatArray = field(default_factory=lambda: np.zeros(2))

    @classmethod
    def zeros(cls, count: int) -> GradientBuffers:
        return cls(
            d_mean_w=np.zeros((count, 3)),
            d_log_scale=np.zeros((count, 3)),
            d_rotation_q=np.zeros((count, 4)),
            d_opacity_logit=np.zeros(count),
            d_colour=np.zeros((count, 3)),
        )

    @property
    def count(self) -> int:
        return int(self.d_mean_w.shape[0])

    def reset(self) -> None:
        for array in self._arrays():
            array.fill(0.0)

    def accumulate(self, other: GradientBuffers) -> None:
        """Add another buffer set of the same size in place."""
        for mine, theirs in zip(self._arrays(), other._arrays(), strict=True):
            mine += theirs

    def is_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(array))) for array in self._arrays())

    def gaussian_groups(self) -> dict[str, FloatArray]:
        """Gaussian gradients keyed by GaussianMap attribute name."""
        return {
            "mean_w": self.d_mean_w,
            "log_scale": self.d_log_scale,
            "rotation_q": self.d_rotation_q,
            "opacity_logit": self.d_opacity_logit,
            "colour_logit": self.d_colour,
        }

    def _arrays(self) -> tuple[FloatArray, ...]:
        return (
            self.d_mean_w,
            self.d_log_scale,
            self.d_rotation_q,
            self.d_opacity_logit,
            self.d_colour,
            self.d_camera_twist,
            self.d_exposure,
        )


def d_meanC_d_pose(mu_c: FloatArray) -> FloatArray:
    """3x6 block [I | -mu_C^x], columns ordered [rho; theta]."""
    return np.hstack([np.eye(3), -skew(mu_c)])


def d_W_d_pose(W: FloatArray) -> FloatArray:
    """(6, 3, 3) derivatives of the rotation of Exp(tau) o T_CW at tau = 0."""
    blocks = np.zeros((6, 3, 3))
    for k in range(3):
        blocks[3 + k] = skew(np.eye(3)[k]) @ W
    return blocks


class _ImageGrads(NamedTuple):
    """Per-splat image-space gradients of one tile."""

    splats: NDArray[np.int64]
    mu_i: FloatArray
    conic: FloatArray
    depth: FloatArray
    opacity: FloatArray
    colour: FloatArray


def _tile_backward(
    render_output: RenderOutput,
    tile: TileRecord,
    grad_colour: FloatArray,
    grad_depth: FloatArray | None,
    settings: RendererSettings,
) -> _ImageGrads | None:
    if tile.splats.shape[0] == 0 or not np.any(tile.recorded):
        return None
    projection = render_output.projection
    splats = tile.splats
    us, vs = tile.pixel_grid()
    rows = slice(tile.y0, tile.y1)
    cols = slice(tile.x0, tile.x1)
    g_c = grad_colour[rows, cols].reshape(-1, 3)
    g_d = grad_depth[rows, cols].reshape(-1) if grad_depth is not None else None

    recorded = tile.recorded
    alpha = np.where(recorded, tile.alpha, 0.0)
    weight = alpha * tile.t_before

    colours = projection.colour[splats]
    value = colours @ g_c.T
    if g_d is not None:
        value = value + projection.depth[splats, None] * g_d[None, :]
    contribution = value * weight
    running = np.cumsum(contribution, axis=0)
    suffix = running[-1][None, :] - running
    d_alpha = np.where(
        recorded, value * tile.t_before - suffix / np.where(recorded, 1.0 - alpha, 1.0), 0.0
    )

    d_colour = weight @ g_c
    d_depth = weight @ g_d if g_d is not None else np.zeros(splats.shape[0])

    dx, dy, falloff, _, _ = splat_alpha(projection, splats, us, vs, settings)
    opacity = projection.opacity[splats]
    unclamped = recorded & (opacity[:, None] * falloff < settings.alpha_max)
    d_alpha = np.where(unclamped, d_alpha, 0.0)
    d_opacity = np.sum(d_alpha * falloff, axis=1)
    d_power = d_alpha * opacity[:, None] * falloff

    conic = projection.conic[splats]
    a_dx = conic[:, 0, 0, None] * dx + conic[:, 0, 1, None] * dy
    a_dy = conic[:, 0, 1, None] * dx + conic[:, 1, 1, None] * dy
    d_mu = np.stack([np.sum(d_power * a_dx, axis=1), np.sum(d_power * a_dy, axis=1)], axis=-1)

    d_conic = np.empty((splats.shape[0], 2, 2))
    d_conic[:, 0, 0] = -0.5 * np.sum(d_power * dx * dx, axis=1)
    d_conic[:, 0, 1] = -0.5 * np.sum(d_power * dx * dy, axis=1)
    d_conic[:, 1, 0] = d_conic[:, 0, 1]
    d_conic[:, 1, 1] = -0.5 * np.sum(d_power * dy * dy, axis=1)

    return _ImageGrads(splats, d_mu, d_conic, d_depth, d_opacity, d_colour)


def backward(
    render_output: RenderOutput,
    grad_colour: FloatArray,
    grad_depth: FloatArray | None,
    gaussian_map: GaussianMap,
    settings: RendererSettings | None = None,
    threads: int = 1,
) -> GradientBuffers:
    """Gradients of a loss given its per-pixel derivatives dL/dC_p and dL/dD_p.

    Args:
        render_output: Forward pass recorded with record_contributors.
        grad_colour: (H, W, 3) derivative with respect to the output colour
            (after exposure, when the render carries one).
        grad_depth: (H, W) derivative with respect to the depth buffer, or None.
        gaussian_map: The snapshot that was rendered.
        settings: Must match the forward pass.
        threads: Worker threads over tiles; tiles are summed in tile order.

    Returns:
        GradientBuffers sized to the map, in map row order.

    Raises:
        MissingContributors: the render kept no contributor records.
    """
    if render_output.tiles is None:
        raise MissingContributors("render was run without record_contributors")
    settings = settings or RendererSettings()
    grads = GradientBuffers.zeros(gaussian_map.count)

    if render_output.exposure is not None:
        gain = float(np.exp(render_output.exposure.a))
        grads.d_exposure[0] = float(np.sum(grad_colour * gain * render_output.raw_colour))
        grads.d_exposure[1] = float(np.sum(grad_colour))
        grad_colour = grad_colour * gain

    projection = render_output.projection
    n = projection.count
    if n == 0:
        return grads

    def work(tile: TileRecord) -> _ImageGrads | None:
        return _tile_backward(render_output, tile, grad_colour, grad_depth, settings)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_tile = list(pool.map(work, render_output.tiles))
    else:
        per_tile = [work(tile) for tile in render_output.tiles]

    g_mu_i = np.zeros((n, 2))
    g_conic = np.zeros((n, 2, 2))
    g_depth = np.zeros(n)
    g_opacity = np.zeros(n)
    g_colour = np.zeros((n, 3))
    for item in per_tile:
        if item is None:
            continue
        # splat indices are unique within a tile
        g_mu_i[item.splats] += item.mu_i
        g_conic[item.splats] += item.conic
        g_depth[item.splats] += item.depth
        g_opacity[item.splats] += item.opacity
        g_colour[item.splats] += item.colour

    # conic = inverse(Sigma_I + dilation): dL/dSigma_I = -A dL/dA A
    A = projection.conic
    g_cov_i = -A @ g_conic @ A

    W = render_output.pose.rotation
    J = projection.jacobian
    T = J @ W
    cov_w = projection.cov_w
    g_cov_w = np.transpose(T, (0, 2, 1)) @ g_cov_i @ T
    g_T = 2.0 * g_cov_i @ T @ cov_w
    g_J = g_T @ W.T
    g_W = np.transpose(J, (0, 2, 1)) @ g_T

    mean_c = projection.mean_c
    K = render_output.intrinsics
    dJ = projection_jacobian_derivatives(mean_c, K.fx, K.fy)
    g_mean_c = np.einsum("nab,na->nb", J, g_mu_i)
    g_mean_c[:, 2] += g_depth
    g_mean_c += np.einsum("nab,nabc->nc", g_J, dJ)

    rows = projection.rows
    grads.d_mean_w[rows] = g_mean_c @ W

    grads.d_camera_twist[:3] = np.sum(g_mean_c, axis=0)
    grads.d_camera_twist[3:] = np.sum(np.cross(mean_c, g_mean_c), axis=0)
    grads.d_camera_twist += np.einsum("kij,ij->k", d_W_d_pose(W), np.sum(g_W, axis=0))

    # Sigma_W = M M^T with M = R diag(s)
    q_raw = gaussian_map.rotation_q[rows]
    q_norm = np.linalg.norm(q_raw, axis=1, keepdims=True)
    q = normalize_quaternions(q_raw)
    R = quaternion_to_matrix(q)
    scale = np.exp(gaussian_map.log_scale[rows])
    M = R * scale[:, None, :]
    g_M = 2.0 * g_cov_w @ M
    g_R = g_M * scale[:, None, :]
    g_scale = np.sum(g_M * R, axis=1)
    grads.d_log_scale[rows] = g_scale * scale

    g_q = np.einsum("nkij,nij->nk", quaternion_matrix_jacobian(q), g_R)
    g_q = (g_q - np.sum(g_q * q, axis=1, keepdims=True) * q) / q_norm
    grads.d_rotation_q[rows] = g_q

    opacity = projection.opacity
    grads.d_opacity_logit[rows] = g_opacity * opacity * (1.0 - opacity)
    colour = projection.colour
    grads.d_colour[rows] = g_colour * colour * (1.0 - colour)
    return grads
