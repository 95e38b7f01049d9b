# ---
# entity_id: module-gaussian-ply
# entity_name: Gaussian PLY Export
# entity_type_id: module
# entity_path: splat_slam/gaussians/ply.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T12:00:00Z
# entity_exports: [save_ply, load_ply]
# entity_dependencies: [plyfile, numpy]
# entity_callers: [pipeline, cli]
# entity_callees: [GaussianMap]
# entity_semver_impact: minor
# entity_breaking_change_risk: medium
# ---

"""
Binary little-endian PLY in the common 3DGS vertex layout.

Properties x, y, z, f_dc_0..2, opacity, scale_0..2, rot_0..3 hold
pre-activation values with the DC colour (colour - 0.5) / SH_C0. Values are
written as doubles, and the colour logits plus bookkeeping ride along as
extra properties so a reloaded map renders bit-identically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from plyfile import PlyData, PlyElement

from splat_slam.errors import MapFormatError
from splat_slam.gaussians.model import GaussianMap, colour_to_logit

SH_C0 = 0.28209479177387814

_ATTRIBUTES = (
    ["x", "y", "z"]
    + [f"f_dc_{i}" for i in range(3)]
    + ["opacity"]
    + [f"scale_{i}" for i in range(3)]
    + [f"rot_{i}" for i in range(4)]
)
_EXTRA = [f"colour_logit_{i}" for i in range(3)]


def save_ply(gaussian_map: GaussianMap, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    f_dc = (gaussian_map.colour - 0.5) / SH_C0
    attributes = np.concatenate(
        (
            gaussian_map.mean_w,
            f_dc,
            gaussian_map.opacity_logit[:, None],
            gaussian_map.log_scale,
            gaussian_map.rotation_q,
            gaussian_map.colour_logit,
        ),
        axis=1,
    )
    dtype_full = [(name, "<f8") for name in _ATTRIBUTES + _EXTRA]
    dtype_full += [("origin_keyframe", "<i4"), ("creation_order", "<i8")]
    elements = np.empty(gaussian_map.count, dtype=dtype_full)
    for column, name in enumerate(_ATTRIBUTES + _EXTRA):
        elements[name] = attributes[:, column]
    elements["origin_keyframe"] = gaussian_map.origin_keyframe
    elements["creation_order"] = gaussian_map.creation_order
    PlyData([PlyElement.describe(elements, "vertex")], byte_order="<").write(str(path))


def load_ply(path: Path, seed: int = 0) -> GaussianMap:
    """Read a map written by save_ply (or any file with the standard vertex layout).

    Raises:
        MapFormatError: unreadable file or missing vertex properties.
    """
    try:
        data = PlyData.read(str(path))
        vertex = data["vertex"]
    except Exception as exc:  # plyfile raises its own PlyHeaderParseError too
        raise MapFormatError(f"cannot read PLY {path}: {exc}") from exc

    names = {prop.name for prop in vertex.properties}
    missing = [name for name in _ATTRIBUTES if name not in names]
    if missing:
        raise MapFormatError(f"{path}: missing vertex properties {missing}")

    def columns(keys: list[str]) -> NDArray[np.float64]:
        return np.stack([np.asarray(vertex[key], dtype=np.float64) for key in keys], axis=1)

    n = len(vertex.data)
    if all(name in names for name in _EXTRA):
        colour_logit = columns(_EXTRA)
    else:
        colour_logit = colour_to_logit(columns([f"f_dc_{i}" for i in range(3)]) * SH_C0 + 0.5)
    creation_order = (
        np.asarray(vertex["creation_order"], dtype=np.int64)
        if "creation_order" in names
        else np.arange(n, dtype=np.int64)
    )
    origin = (
        np.asarray(vertex["origin_keyframe"], dtype=np.int64)
        if "origin_keyframe" in names
        else np.zeros(n, dtype=np.int64)
    )
    return GaussianMap(
        mean_w=columns(["x", "y", "z"]),
        log_scale=columns([f"scale_{i}" for i in range(3)]),
        rotation_q=columns([f"rot_{i}" for i in range(4)]),
        opacity_logit=np.asarray(vertex["opacity"], dtype=np.float64).copy(),
        colour_logit=colour_logit,
        origin_keyframe=origin,
        creation_order=creation_order,
        next_order=int(creation_order.max()) + 1 if n else 0,
        rng=np.random.default_rng(seed),
    )
