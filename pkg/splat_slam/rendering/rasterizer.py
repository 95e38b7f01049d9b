# ---
# entity_id: module-rendering-rasterizer
# entity_name: Tile Rasterizer
# entity_type_id: module
# entity_path: splat_slam/rendering/rasterizer.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-25T09:00:00Z
# entity_exports: [render, render_reference, RenderOutput, apply_exposure, median_depth]
# entity_dependencies: [numpy]
# entity_callers: [backward, tracker, mapper, pipeline, evaluation, datasets, cli]
# entity_callees: [project_gaussians]
# entity_semver_impact: major
# entity_breaking_change_risk: high
# ---

"""
Forward rasterization of projected splats.

Provides:
- render: 16x16 tile rasterizer, optionally tile-parallel
- render_reference: brute-force global-sort renderer over the whole image
- RenderOutput: buffers plus per-tile contributor records for backward
- apply_exposure: affine brightness exp(a) * C + b

Per pixel, splats are blended front to back in (depth_z, id) order with
alpha = min(alpha_max, opacity * exp(-0.5 d^T conic d)). A splat reaches a
pixel only inside its 3-sigma ellipse and above alpha_min; blending stops
before the contribution that would drop transmittance below T_min. All
sums run sequentially along the sorted axis, so the tiled and brute-force
renderers agree bit for bit.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from splat_slam.gaussians.model import GaussianMap
from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.rendering.projection import (
    FOOTPRINT_MAHALANOBIS_SQ,
    ProjectedSplats,
    project_gaussians,
)
from splat_slam.settings import RendererSettings
from splat_slam.slam.frame import Exposure

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]
BoolArray = NDArray[np.bool_]

# transmittance above which a contribution marks its Gaussian visible
VISIBILITY_TRANSMITTANCE = 0.5


class Contributor(NamedTuple):
    gaussian_id: int
    alpha: float
    transmittance: float


@dataclass(frozen=True, eq=False)
class TileRecord:
    """Blending state of one tile; splats index the projection in depth order."""

    x0: int
    y0: int
    x1: int
    y1: int
    splats: IntArray
    alpha: FloatArray
    t_before: FloatArray
    recorded: BoolArray

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    def pixel_grid(self) -> tuple[FloatArray, FloatArray]:
        vs, us = np.meshgrid(
            np.arange(self.y0, self.y1, dtype=np.float64),
            np.arange(self.x0, self.x1, dtype=np.float64),
            indexing="ij",
        )
        return us.ravel(), vs.ravel()


@dataclass(frozen=True, eq=False)
class RenderOutput:
    colour: FloatArray
    depth: FloatArray
    acc_opacity: FloatArray
    visible_flags: BoolArray
    gaussian_ids: IntArray
    projection: ProjectedSplats
    pose: SE3Pose
    intrinsics: CameraIntrinsics
    tile_size: int
    tiles: list[TileRecord] | None
    raw_colour: FloatArray
    exposure: Exposure | None = None

    @property
    def exposure_applied(self) -> bool:
        return self.exposure is not None

    @property
    def has_contributors(self) -> bool:
        return self.tiles is not None

    def with_exposure(self, a: float, b: float) -> RenderOutput:
        """Copy with exp(a) * colour + b applied; backward then also fills d_exposure."""
        return dataclasses.replace(
            self,
            colour=apply_exposure(self.raw_colour, a, b),
            exposure=Exposure(float(a), float(b)),
        )

    def visible_ids(self) -> frozenset[int]:
        return frozenset(self.gaussian_ids[self.visible_flags].tolist())

    def contributors(self, u: int, v: int) -> list[Contributor]:
        """Ordered (gaussian_id, alpha, transmittance before) of one pixel."""
        if self.tiles is None:
            return []
        tiles_x = -(-self.intrinsics.width // self.tile_size)
        tile = self.tiles[(v // self.tile_size) * tiles_x + u // self.tile_size]
        p = (v - tile.y0) * tile.width + (u - tile.x0)
        hits = np.flatnonzero(tile.recorded[:, p])
        ids = self.projection.ids[tile.splats[hits]]
        return [
            Contributor(int(i), float(a), float(t))
            for i, a, t in zip(ids, tile.alpha[hits, p], tile.t_before[hits, p], strict=True)
        ]


def apply_exposure(colour: FloatArray, a: float, b: float) -> FloatArray:
    """exp(a) * colour + b, unclamped."""
    return np.exp(a) * colour + b


class _Blend(NamedTuple):
    colour: FloatArray
    depth: FloatArray
    acc: FloatArray
    visible: BoolArray
    alpha: FloatArray
    t_before: FloatArray
    recorded: BoolArray


def splat_alpha(
    projection: ProjectedSplats,
    splats: IntArray,
    us: FloatArray,
    vs: FloatArray,
    settings: RendererSettings,
) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray, BoolArray]:
    """Per (splat, pixel): offsets dx, dy, gaussian falloff and alpha, plus the footprint mask."""
    mu = projection.mu_i[splats]
    conic = projection.conic[splats]
    dx = us[None, :] - mu[:, 0, None]
    dy = vs[None, :] - mu[:, 1, None]
    maha = (
        conic[:, 0, 0, None] * dx * dx
        + 2.0 * conic[:, 0, 1, None] * dx * dy
        + conic[:, 1, 1, None] * dy * dy
    )
    falloff = np.exp(-0.5 * maha)
    alpha = np.minimum(projection.opacity[splats, None] * falloff, settings.alpha_max)
    footprint = maha <= FOOTPRINT_MAHALANOBIS_SQ
    return dx, dy, falloff, alpha, footprint


def _blend(
    projection: ProjectedSplats,
    splats: IntArray,
    us: FloatArray,
    vs: FloatArray,
    settings: RendererSettings,
    with_depth: bool,
) -> _Blend:
    n_pixels = us.shape[0]
    if splats.shape[0] == 0:
        empty = np.zeros((0, n_pixels))
        return _Blend(
            np.zeros((n_pixels, 3)),
            np.zeros(n_pixels),
            np.zeros(n_pixels),
            np.zeros(0, dtype=bool),
            empty,
            empty,
            np.zeros((0, n_pixels), dtype=bool),
        )

    _, _, _, alpha, footprint = splat_alpha(projection, splats, us, vs, settings)
    valid = footprint & (alpha >= settings.alpha_min)
    alpha = np.where(valid, alpha, 0.0)
    t_raw = np.cumprod(1.0 - alpha, axis=0)
    included = valid & (t_raw >= settings.transmittance_min)
    alpha = np.where(included, alpha, 0.0)
    t_after = np.cumprod(1.0 - alpha, axis=0)
    t_before = np.vstack([np.ones((1, n_pixels)), t_after[:-1]])
    weight = alpha * t_before

    colour = np.cumsum(weight[:, :, None] * projection.colour[splats, None, :], axis=0)[-1]
    if with_depth:
        depth = np.cumsum(weight * projection.depth[splats, None], axis=0)[-1]
    else:
        depth = np.zeros(n_pixels)
    visible = np.any(included & (t_before > VISIBILITY_TRANSMITTANCE), axis=1)
    recorded = included & (np.cumsum(included, axis=0) <= settings.max_contributors)
    return _Blend(colour, depth, 1.0 - t_after[-1], visible, alpha, t_before, recorded)


def _tile_splats(
    projection: ProjectedSplats, order: IntArray, tile_size: int, tiles_x: int, tiles_y: int
) -> list[IntArray]:
    """Depth-ordered splat lists per tile from each splat's 3-sigma bounding square."""
    mu = projection.mu_i[order]
    radius = projection.radius[order]
    tx0 = np.clip(np.floor((mu[:, 0] - radius) / tile_size), 0, tiles_x - 1).astype(np.int64)
    tx1 = np.clip(np.floor((mu[:, 0] + radius) / tile_size), 0, tiles_x - 1).astype(np.int64)
    ty0 = np.clip(np.floor((mu[:, 1] - radius) / tile_size), 0, tiles_y - 1).astype(np.int64)
    ty1 = np.clip(np.floor((mu[:, 1] + radius) / tile_size), 0, tiles_y - 1).astype(np.int64)
    lists = []
    for ty in range(tiles_y):
        rows = (ty0 <= ty) & (ty <= ty1)
        for tx in range(tiles_x):
            lists.append(order[rows & (tx0 <= tx) & (tx <= tx1)])
    return lists


def _assemble(
    gaussian_map: GaussianMap,
    projection: ProjectedSplats,
    pose: SE3Pose,
    K: CameraIntrinsics,
    tile_size: int,
    records: list[tuple[int, int, int, int, IntArray, _Blend]],
    record_contributors: bool,
) -> RenderOutput:
    colour = np.zeros((K.height, K.width, 3))
    depth = np.zeros((K.height, K.width))
    acc = np.zeros((K.height, K.width))
    visible_splats = np.zeros(projection.count, dtype=bool)
    tiles: list[TileRecord] = []
    for x0, y0, x1, y1, splats, blend in records:
        h, w = y1 - y0, x1 - x0
        colour[y0:y1, x0:x1] = blend.colour.reshape(h, w, 3)
        depth[y0:y1, x0:x1] = blend.depth.reshape(h, w)
        acc[y0:y1, x0:x1] = blend.acc.reshape(h, w)
        visible_splats[splats[blend.visible]] = True
        if record_contributors:
            tiles.append(
                TileRecord(x0, y0, x1, y1, splats, blend.alpha, blend.t_before, blend.recorded)
            )

    visible_flags = np.zeros(gaussian_map.count, dtype=bool)
    visible_flags[projection.rows[visible_splats]] = True
    return RenderOutput(
        colour=colour,
        depth=depth,
        acc_opacity=acc,
        visible_flags=visible_flags,
        gaussian_ids=gaussian_map.creation_order.copy(),
        projection=projection,
        pose=pose,
        intrinsics=K,
        tile_size=tile_size,
        tiles=tiles if record_contributors else None,
        raw_colour=colour,
    )


def render(
    gaussian_map: GaussianMap,
    pose: SE3Pose,
    K: CameraIntrinsics,
    with_depth: bool = True,
    record_contributors: bool = True,
    settings: RendererSettings | None = None,
    threads: int = 1,
) -> RenderOutput:
    """Rasterize a map snapshot at pose T_CW.

    Args:
        gaussian_map: Snapshot to render; never mutated.
        pose: World-to-camera pose.
        K: Intrinsics, including output size.
        with_depth: Blend the depth buffer as well.
        record_contributors: Keep per-tile records needed by backward().
        settings: Rasterizer constants.
        threads: Worker threads over tiles; output does not depend on it.

    Returns:
        RenderOutput with colour, depth and accumulated opacity buffers.
    """
    settings = settings or RendererSettings()
    projection = project_gaussians(gaussian_map, pose, K, settings)
    order = projection.depth_order()
    tile = settings.tile_size
    tiles_x, tiles_y = -(-K.width // tile), -(-K.height // tile)
    per_tile = _tile_splats(projection, order, tile, tiles_x, tiles_y)

    def work(index: int) -> tuple[int, int, int, int, IntArray, _Blend]:
        ty, tx = divmod(index, tiles_x)
        x0, y0 = tx * tile, ty * tile
        x1, y1 = min(x0 + tile, K.width), min(y0 + tile, K.height)
        vs, us = np.meshgrid(
            np.arange(y0, y1, dtype=np.float64), np.arange(x0, x1, dtype=np.float64), indexing="ij"
        )
        splats = per_tile[index]
        blend = _blend(projection, splats, us.ravel(), vs.ravel(), settings, with_depth)
        return x0, y0, x1, y1, splats, blend

    indices = range(tiles_x * tiles_y)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(work, indices))
    else:
        records = [work(i) for i in indices]
    return _assemble(gaussian_map, projection, pose, K, tile, records, record_contributors)


def render_reference(
    gaussian_map: GaussianMap,
    pose: SE3Pose,
    K: CameraIntrinsics,
    with_depth: bool = True,
    settings: RendererSettings | None = None,
) -> RenderOutput:
    """Brute-force renderer: every pixel blends the globally sorted splat list."""
    settings = settings or RendererSettings()
    projection = project_gaussians(gaussian_map, pose, K, settings)
    order = projection.depth_order()
    vs, us = np.meshgrid(
        np.arange(K.height, dtype=np.float64), np.arange(K.width, dtype=np.float64), indexing="ij"
    )
    blend = _blend(projection, order, us.ravel(), vs.ravel(), settings, with_depth)
    record = (0, 0, K.width, K.height, order, blend)
    return _assemble(
        gaussian_map, projection, pose, K, max(K.width, K.height), [record], True
    )


def median_depth(output: RenderOutput, tau_opaque: float = 0.5) -> float:
    """Median rendered depth over pixels with accumulated opacity >= tau_opaque, 0 if none."""
    valid = output.acc_opacity >= tau_opaque
    if not np.any(valid):
        return 0.0
    return float(np.median(output.depth[valid]))
