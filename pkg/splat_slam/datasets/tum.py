# ---
# entity_id: module-datasets-tum
# entity_name: TUM RGB-D Reader
# entity_type_id: module
# entity_path: splat_slam/datasets/tum.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-27T12:30:00Z
# entity_exports: [SequenceSource, load_tum, export_tum, associate, read_index]
# entity_dependencies: [numpy, pyyaml, scikit-image]
# entity_callers: [cli]
# entity_callees: [read_colour_png, read_depth_png, load_trajectory, save_trajectory]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
TUM RGB-D directory layout.

    rgb.txt / depth.txt   "timestamp filename" per line, '#' comments
    groundtruth.txt       "timestamp tx ty tz qx qy qz qw" (optional)
    calibration.yaml      fx, fy, cx, cy, width, height (optional)

Depth images are 16-bit PNG at 5000 counts per metre. Without a
calibration file the published intrinsics are picked from the freiburg id
in the directory name.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml
from pydantic import ValidationError

from splat_slam.datasets.synthetic import SyntheticScene
from splat_slam.datasets.trajectory import load_trajectory, save_trajectory
from splat_slam.errors import (
    DatasetError,
    ImageDecodeError,
    MissingIndexFile,
    TimestampOrderError,
)
from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.logging import get_logger
from splat_slam.rendering.image_io import (
    DEPTH_SCALE,
    read_colour_png,
    read_depth_png,
    save_colour_png,
    save_depth_png,
)
from splat_slam.slam.frame import Frame

logger = get_logger(__name__)

RGB_INDEX = "rgb.txt"
DEPTH_INDEX = "depth.txt"
GROUND_TRUTH = "groundtruth.txt"
CALIBRATION = "calibration.yaml"

TUM_WIDTH, TUM_HEIGHT = 640, 480
FREIBURG_INTRINSICS = {
    "freiburg1": (517.3, 516.5, 318.6, 255.3),
    "freiburg2": (520.9, 521.0, 325.1, 249.7),
    "freiburg3": (535.4, 539.2, 320.1, 247.6),
}
DEFAULT_INTRINSICS = (525.0, 525.0, 319.5, 239.5)


def read_index(path: Path) -> list[tuple[float, str]]:
    """Parse an index file into (timestamp, relative path) pairs.

    Raises:
        MissingIndexFile: the file does not exist.
        TimestampOrderError: timestamps are not strictly increasing.
        DatasetError: a line cannot be parsed.
    """
    if not path.is_file():
        raise MissingIndexFile(path)
    entries: list[tuple[float, str]] = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            timestamp = float(parts[0])
            name = parts[1]
        except (ValueError, IndexError) as exc:
            raise DatasetError(f"{path}:{number}: cannot parse {line!r}") from exc
        if entries and timestamp <= entries[-1][0]:
            raise TimestampOrderError(f"{path}:{number}: timestamp {timestamp} not increasing")
        entries.append((timestamp, name))
    return entries


def associate(
    first: Sequence[float], second: Sequence[float], max_difference: float = 0.02
) -> dict[int, int]:
    """Greedy nearest-timestamp matching; each index is used at most once.

    Candidate pairs closer than max_difference are taken in order of
    increasing time difference.

    Returns:
        Map from an index of `first` to its matched index of `second`.
    """
    a = np.asarray(first, dtype=np.float64)
    b = np.asarray(second, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return {}
    gaps = np.abs(a[:, None] - b[None, :])
    i, j = np.nonzero(gaps < max_difference)
    order = np.lexsort((j, i, gaps[i, j]))
    matches: dict[int, int] = {}
    used: set[int] = set()
    for k in order:
        fi, sj = int(i[k]), int(j[k])
        if fi in matches or sj in used:
            continue
        matches[fi] = sj
        used.add(sj)
    return matches


@dataclass(frozen=True)
class FrameEntry:
    timestamp: float
    rgb_path: Path
    depth_path: Path | None


@dataclass(frozen=True, eq=False)
class SequenceSource:
    """An associated, lazily decoded sequence."""

    root: Path
    entries: tuple[FrameEntry, ...]
    intrinsics: CameraIntrinsics
    depth_scale: float = DEPTH_SCALE
    downscale: int = 1
    ground_truth: tuple[list[float], list[SE3Pose]] | None = None

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def timestamps(self) -> list[float]:
        return [entry.timestamp for entry in self.entries]

    @property
    def has_depth(self) -> bool:
        return any(entry.depth_path is not None for entry in self.entries)

    def frame(self, index: int) -> Frame:
        """Decode one frame.

        Raises:
            ImageDecodeError: naming the unreadable file.
        """
        entry = self.entries[index]
        step = self.downscale
        rgb = read_colour_png(entry.rgb_path)[::step, ::step]
        depth = None
        if entry.depth_path is not None:
            depth = read_depth_png(entry.depth_path, self.depth_scale)[::step, ::step]
        return Frame(index, entry.timestamp, np.ascontiguousarray(rgb), self.intrinsics, depth)

    def __iter__(self) -> Iterator[Frame]:
        for index in range(len(self.entries)):
            yield self.frame(index)


def read_calibration(path: Path) -> CameraIntrinsics:
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        return CameraIntrinsics.model_validate(data)
    except (yaml.YAMLError, ValidationError) as exc:
        raise DatasetError(f"{path}: invalid calibration: {exc}") from exc


def default_intrinsics(root: Path) -> CameraIntrinsics:
    fx, fy, cx, cy = next(
        (values for key, values in FREIBURG_INTRINSICS.items() if key in root.name),
        DEFAULT_INTRINSICS,
    )
    return CameraIntrinsics(fx=fx, fy=fy, cx=cx, cy=cy, width=TUM_WIDTH, height=TUM_HEIGHT)


def load_tum(
    root: Path,
    downscale: int = 1,
    max_difference: float = 0.02,
    depth_scale: float = DEPTH_SCALE,
) -> SequenceSource:
    """Index a TUM-layout directory.

    Every rgb.txt entry becomes a frame; depth is attached when a depth
    timestamp lies within max_difference, otherwise the frame is RGB-only.

    Raises:
        MissingIndexFile: rgb.txt is absent.
        ImageDecodeError: an indexed rgb image does not exist.
        TimestampOrderError: an index is not strictly increasing.
    """
    rgb = read_index(root / RGB_INDEX)
    depth_index = root / DEPTH_INDEX
    depth = read_index(depth_index) if depth_index.is_file() else []
    matches = associate([t for t, _ in rgb], [t for t, _ in depth], max_difference)

    entries = []
    for i, (timestamp, name) in enumerate(rgb):
        rgb_path = root / name
        if not rgb_path.is_file():
            raise ImageDecodeError(rgb_path, "missing image")
        depth_path = root / depth[matches[i]][1] if i in matches else None
        entries.append(FrameEntry(timestamp, rgb_path, depth_path))

    calibration = root / CALIBRATION
    if calibration.is_file():
        intrinsics = read_calibration(calibration)
    else:
        intrinsics = default_intrinsics(root)
    if downscale > 1:
        intrinsics = intrinsics.downscaled(downscale)

    ground_truth = None
    if (root / GROUND_TRUTH).is_file():
        ground_truth = load_trajectory(root / GROUND_TRUTH)

    logger.info(
        "loaded sequence",
        root=str(root),
        frames=len(entries),
        with_depth=len(matches),
        ground_truth=ground_truth is not None,
    )
    return SequenceSource(root, tuple(entries), intrinsics, depth_scale, downscale, ground_truth)


def _write_index(path: Path, kind: str, rows: list[tuple[float, str]]) -> None:
    lines = [f"# {kind} images", "# timestamp filename"]
    lines += [f"{timestamp:.6f} {name}" for timestamp, name in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def export_tum(scene: SyntheticScene, root: Path, depth_scale: float = DEPTH_SCALE) -> None:
    """Write a synthetic scene in TUM layout, with calibration.yaml and ground truth."""
    root.mkdir(parents=True, exist_ok=True)
    rgb_rows: list[tuple[float, str]] = []
    depth_rows: list[tuple[float, str]] = []
    for frame in scene.frames:
        name = f"{frame.timestamp:.6f}.png"
        save_colour_png(root / "rgb" / name, frame.rgb)
        rgb_rows.append((frame.timestamp, f"rgb/{name}"))
        if frame.depth is not None:
            save_depth_png(root / "depth" / name, frame.depth, depth_scale)
            depth_rows.append((frame.timestamp, f"depth/{name}"))
    _write_index(root / RGB_INDEX, "color", rgb_rows)
    if depth_rows:
        _write_index(root / DEPTH_INDEX, "depth", depth_rows)
    save_trajectory(scene.timestamps, scene.poses, root / GROUND_TRUTH)
    calibration = scene.intrinsics.model_dump()
    (root / CALIBRATION).write_text(yaml.safe_dump(calibration, sort_keys=False), encoding="utf-8")
    logger.info("exported sequence", root=str(root), frames=len(scene.frames))
