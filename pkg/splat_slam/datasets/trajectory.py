# ---
# entity_id: module-datasets-trajectory
# entity_name: Trajectory Files
# entity_type_id: module
# entity_path: splat_slam/datasets/trajectory.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-27T12:00:00Z
# entity_exports: [save_trajectory, load_trajectory, format_pose_line]
# entity_dependencies: [numpy]
# entity_callers: [cli, tum, evaluation]
# entity_callees: [SE3Pose]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
TUM-convention trajectory files.

Each line is "timestamp tx ty tz qx qy qz qw" of the camera-to-world pose,
six decimals, canonical quaternion (qw >= 0). Poses in memory are T_CW.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from splat_slam.errors import TrajectoryFormatError
from splat_slam.geometry.lie import SE3Pose


def _fixed(value: float) -> str:
    # round first so tiny negatives do not print as -0.000000
    return f"{round(float(value), 6) + 0.0:.6f}"


def format_pose_line(timestamp: float, pose_cw: SE3Pose) -> str:
    pose_wc = pose_cw.inverse()
    values = [timestamp, *pose_wc.translation, *pose_wc.quaternion_xyzw()]
    return " ".join(_fixed(v) for v in values)


def save_trajectory(timestamps: Sequence[float], poses: Sequence[SE3Pose], path: Path) -> None:
    """Write world-to-camera poses as a camera-to-world TUM trajectory.

    Raises:
        ValueError: timestamps and poses differ in length.
        OSError: the file cannot be written.
    """
    if len(timestamps) != len(poses):
        raise ValueError(f"{len(timestamps)} timestamps for {len(poses)} poses")
    lines = [format_pose_line(t, pose) for t, pose in zip(timestamps, poses, strict=True)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_trajectory(path: Path) -> tuple[list[float], list[SE3Pose]]:
    """Read a TUM trajectory; returns timestamps and world-to-camera poses.

    Raises:
        TrajectoryFormatError: a line does not hold eight numbers.
        OSError: the file cannot be read.
    """
    timestamps: list[float] = []
    poses: list[SE3Pose] = []
    for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace(",", " ").split()
        try:
            values = np.array([float(x) for x in fields], dtype=np.float64)
        except ValueError as exc:
            raise TrajectoryFormatError(f"{path}:{number}: {exc}") from exc
        if values.shape[0] != 8:
            raise TrajectoryFormatError(
                f"{path}:{number}: expected 8 fields, found {values.shape[0]}"
            )
        pose_wc = SE3Pose.from_quaternion(values[4:8], values[1:4])
        timestamps.append(float(values[0]))
        poses.append(pose_wc.inverse())
    return timestamps, poses
