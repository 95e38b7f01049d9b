# ---
# entity_id: module-datasets-synthetic
# entity_name: Synthetic Scenes
# entity_type_id: module
# entity_path: splat_slam/datasets/synthetic.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-27T11:00:00Z
# entity_exports: [SyntheticSpec, SyntheticScene, TrajectoryKind, generate_synthetic, look_at]
# entity_dependencies: [numpy, pydantic]
# entity_callers: [cli, funnel, tests]
# entity_callees: [render, GaussianMap.append]
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""
Seeded synthetic Gaussian scenes rendered with the production rasterizer.

Provides:
- SyntheticSpec: scene size, trajectory kind, resolution and seed
- generate_synthetic: ground-truth map, poses and RGB-D frames
- look_at: world-to-camera pose of a camera at `center` facing `target`

Frames come straight out of `render`, so the ground-truth map reproduces
them exactly. Trajectory kinds:
- orbit: a 60 degree arc around the scene centre, every camera facing it
- line: a sideways sweep with fixed orientation
- funnel: a textured plane, nine training views on a square, the centre
  view as target, and test starts on rings around it
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from splat_slam.gaussians.model import GaussianMap, colour_to_logit, logit
from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.rendering.image_io import DEPTH_SCALE
from splat_slam.rendering.rasterizer import render
from splat_slam.settings import FunnelSettings, RendererSettings
from splat_slam.slam.frame import Frame

FloatArray = NDArray[np.float64]

FRAME_RATE = 30.0


class TrajectoryKind(str, Enum):
    ORBIT = "orbit"
    LINE = "line"
    FUNNEL = "funnel"


class SyntheticSpec(BaseModel):
    """What to generate. Defaults give a desk-scale RGB-D orbit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_gaussians: int = Field(default=200, ge=1)
    trajectory: TrajectoryKind = TrajectoryKind.ORBIT
    n_frames: int = Field(default=30, ge=1)
    width: int = Field(default=160, ge=8)
    height: int = Field(default=120, ge=8)
    seed: int = 0
    box_extent: float = Field(default=0.6, gt=0.0, description="Half-size of the Gaussian box, m")
    scale_range: tuple[float, float] = (0.04, 0.12)
    opacity_range: tuple[float, float] = (0.75, 0.99)
    orbit_radius: float = Field(default=2.0, gt=0.0)
    orbit_height: float = Field(default=0.3)
    arc_degrees: float = Field(default=60.0, gt=0.0, le=360.0)
    line_length: float = Field(default=0.6, gt=0.0)
    depth_min_opacity: float = Field(
        default=0.9, ge=0.0, le=1.0, description="Depth pixels below this opacity read 0"
    )
    quantize: bool = Field(default=False, description="Round frames to 8-bit colour and 1/5000 m")
    funnel: FunnelSettings = Field(default_factory=FunnelSettings)


@dataclass
class SyntheticScene:
    spec: SyntheticSpec
    gaussian_map: GaussianMap
    poses: list[SE3Pose]
    intrinsics: CameraIntrinsics
    frames: list[Frame]
    timestamps: list[float]
    target_index: int | None = None
    test_poses: dict[float, list[SE3Pose]] = field(default_factory=dict)

    @property
    def target_pose(self) -> SE3Pose:
        if self.target_index is None:
            raise ValueError("scene has no target view")
        return self.poses[self.target_index]


def look_at(center: ArrayLike, target: ArrayLike, up: ArrayLike = (0.0, 0.0, 1.0)) -> SE3Pose:
    """T_CW of a camera at `center` whose optical axis (+z) points at `target`, image y down."""
    c = np.asarray(center, dtype=np.float64)
    z_c = np.asarray(target, dtype=np.float64) - c
    z_c /= np.linalg.norm(z_c)
    x_c = np.cross(z_c, np.asarray(up, dtype=np.float64))
    x_c /= np.linalg.norm(x_c)
    y_c = np.cross(z_c, x_c)
    rotation_wc = np.stack([x_c, y_c, z_c], axis=1)
    return SE3Pose(rotation=rotation_wc.T, translation=-rotation_wc.T @ c)


def synthetic_intrinsics(width: int, height: int) -> CameraIntrinsics:
    return CameraIntrinsics(
        fx=0.9 * width,
        fy=0.9 * width,
        cx=(width - 1) / 2.0,
        cy=(height - 1) / 2.0,
        width=width,
        height=height,
    )


def _random_quaternions(rng: np.random.Generator, n: int) -> FloatArray:
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def _fill(
    gaussian_map: GaussianMap,
    rng: np.random.Generator,
    means: FloatArray,
    log_scale: FloatArray,
    spec: SyntheticSpec,
) -> None:
    n = means.shape[0]
    opacity = rng.uniform(*spec.opacity_range, size=n)
    colour = rng.uniform(0.1, 0.9, size=(n, 3))
    gaussian_map.append(
        means,
        log_scale,
        _random_quaternions(rng, n),
        logit(opacity),
        colour_to_logit(colour),
        origin_keyframe=0,
    )


def _box_scene(spec: SyntheticSpec, rng: np.random.Generator) -> GaussianMap:
    gaussian_map = GaussianMap.empty(spec.seed)
    n = spec.n_gaussians
    means = rng.uniform(-spec.box_extent, spec.box_extent, size=(n, 3))
    low, high = np.log(spec.scale_range[0]), np.log(spec.scale_range[1])
    _fill(gaussian_map, rng, means, rng.uniform(low, high, size=(n, 3)), spec)
    return gaussian_map


def _plane_scene(spec: SyntheticSpec, rng: np.random.Generator) -> GaussianMap:
    settings = spec.funnel
    n = settings.n_gaussians
    half_fov = (settings.width / 2.0) / (0.9 * settings.width)
    extent = settings.square_width / 2.0 + max(settings.rings) + settings.plane_depth * half_fov
    xy = rng.uniform(-extent, extent, size=(n, 2))
    z = settings.plane_depth + rng.uniform(-0.02, 0.02, size=n)
    means = np.column_stack([xy, z])
    spacing = 2.0 * extent / math.sqrt(n)
    log_scale = np.log(rng.uniform(0.5 * spacing, 1.0 * spacing, size=(n, 3)))
    log_scale[:, 2] = np.log(0.01)
    gaussian_map = GaussianMap.empty(spec.seed)
    _fill(gaussian_map, rng, means, log_scale, spec)
    # flat along z regardless of the drawn rotation
    gaussian_map.rotation_q[:] = np.array([1.0, 0.0, 0.0, 0.0])
    return gaussian_map


def _orbit(spec: SyntheticSpec) -> list[SE3Pose]:
    arc = math.radians(spec.arc_degrees)
    poses = []
    for i in range(spec.n_frames):
        phi = -0.5 * arc + arc * i / max(spec.n_frames - 1, 1)
        center = (
            spec.orbit_radius * math.cos(phi),
            spec.orbit_radius * math.sin(phi),
            spec.orbit_height,
        )
        poses.append(look_at(center, (0.0, 0.0, 0.0)))
    return poses


def _line(spec: SyntheticSpec) -> list[SE3Pose]:
    poses = []
    for i in range(spec.n_frames):
        x = -0.5 * spec.line_length + spec.line_length * i / max(spec.n_frames - 1, 1)
        center = np.array([x, -spec.orbit_radius, spec.orbit_height])
        poses.append(look_at(center, center + np.array([0.0, 1.0, 0.0])))
    return poses


def _funnel(
    spec: SyntheticSpec, rng: np.random.Generator
) -> tuple[list[SE3Pose], int, dict[float, list[SE3Pose]]]:
    """3x3 training grid (the centre is the target) and translation-only test starts."""
    settings = spec.funnel
    half = settings.square_width / 2.0
    training = [
        SE3Pose(translation=-np.array([x, y, 0.0]))
        for y in (-half, 0.0, half)
        for x in (-half, 0.0, half)
    ]
    tests: dict[float, list[SE3Pose]] = {}
    for radius in settings.rings:
        starts = []
        for _ in range(settings.starts_per_ring):
            azimuth = rng.uniform(0.0, 2.0 * math.pi)
            elevation = rng.uniform(-math.pi / 6.0, math.pi / 6.0)
            offset = radius * np.array(
                [
                    math.cos(azimuth) * math.cos(elevation),
                    math.sin(azimuth) * math.cos(elevation),
                    math.sin(elevation),
                ]
            )
            starts.append(SE3Pose(translation=-offset))
        tests[radius] = starts
    return training, 4, tests


def _observe(
    gaussian_map: GaussianMap,
    pose: SE3Pose,
    K: CameraIntrinsics,
    spec: SyntheticSpec,
    settings: RendererSettings,
) -> tuple[FloatArray, FloatArray]:
    output = render(gaussian_map, pose, K, record_contributors=False, settings=settings)
    colour = output.colour
    depth = np.where(output.acc_opacity >= spec.depth_min_opacity, output.depth, 0.0)
    if spec.quantize:
        colour = np.round(np.clip(colour, 0.0, 1.0) * 255.0) / 255.0
        depth = np.round(depth * DEPTH_SCALE) / DEPTH_SCALE
    return colour, depth


def generate_synthetic(
    spec: SyntheticSpec, settings: RendererSettings | None = None
) -> SyntheticScene:
    """Build a scene and render its frames; identical specs give identical scenes."""
    settings = settings or RendererSettings()
    rng = np.random.default_rng(spec.seed)
    target_index: int | None = None
    tests: dict[float, list[SE3Pose]] = {}
    if spec.trajectory == TrajectoryKind.FUNNEL:
        gaussian_map = _plane_scene(spec, rng)
        poses, target_index, tests = _funnel(spec, rng)
        K = synthetic_intrinsics(spec.funnel.width, spec.funnel.height)
    else:
        gaussian_map = _box_scene(spec, rng)
        poses = _orbit(spec) if spec.trajectory == TrajectoryKind.ORBIT else _line(spec)
        K = synthetic_intrinsics(spec.width, spec.height)

    frames = []
    timestamps = []
    for index, pose in enumerate(poses):
        colour, depth = _observe(gaussian_map, pose, K, spec, settings)
        timestamp = round(index / FRAME_RATE, 6)
        frames.append(Frame(index, timestamp, colour, K, depth))
        timestamps.append(timestamp)
    return SyntheticScene(spec, gaussian_map, poses, K, frames, timestamps, target_index, tests)
