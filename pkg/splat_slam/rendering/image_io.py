# ---
# entity_id: module-rendering-image-io
# entity_name: Image Export
# entity_type_id: module
# entity_path: splat_slam/rendering/image_io.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-25T16:00:00Z
# entity_exports: [save_colour_png, save_depth_png, read_colour_png, read_depth_png]
# entity_dependencies: [scikit-image, numpy]
# entity_callers: [cli, datasets]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""8-bit colour and 16-bit depth PNG conversion (depth scaled by 5000 per metre)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from skimage import io

from splat_slam.errors import ImageDecodeError

DEPTH_SCALE = 5000.0


def quantize_colour(colour: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Clamp to [0, 1] and round to 8 bits."""
    return np.round(np.clip(colour, 0.0, 1.0) * 255.0).astype(np.uint8)


def quantize_depth(depth: NDArray[np.float64], scale: float = DEPTH_SCALE) -> NDArray[np.uint16]:
    return np.round(np.clip(depth * scale, 0.0, np.iinfo(np.uint16).max)).astype(np.uint16)


def save_colour_png(path: Path, colour: NDArray[np.float64]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    io.imsave(str(path), quantize_colour(colour), check_contrast=False)


def save_depth_png(path: Path, depth: NDArray[np.float64], scale: float = DEPTH_SCALE) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    io.imsave(str(path), quantize_depth(depth, scale), check_contrast=False)


def _read(path: Path) -> NDArray[np.generic]:
    if not path.is_file():
        raise ImageDecodeError(path, "missing image")
    try:
        return np.asarray(io.imread(str(path)))
    except Exception as exc:
        raise ImageDecodeError(path) from exc


def read_colour_png(path: Path) -> NDArray[np.float64]:
    """RGB image as float64 in [0, 1]; grey images are broadcast, alpha is dropped."""
    image = _read(path)
    if image.ndim == 2:
        image = np.repeat(image[:, :, None], 3, axis=2)
    if image.ndim != 3 or image.shape[2] < 3:
        raise ImageDecodeError(path, f"unexpected image shape {image.shape}")
    maximum = 65535.0 if image.dtype == np.uint16 else 255.0
    return image[:, :, :3].astype(np.float64) / maximum


def read_depth_png(path: Path, scale: float = DEPTH_SCALE) -> NDArray[np.float64]:
    """16-bit depth in metres; zero marks a missing measurement."""
    image = _read(path)
    if image.ndim != 2:
        raise ImageDecodeError(path, f"depth image must be single channel, got {image.shape}")
    return image.astype(np.float64) / scale
