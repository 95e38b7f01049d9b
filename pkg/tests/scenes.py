# ---
# entity_id: test-scenes
# entity_name: Test Scene Builders
# entity_type_id: module
# entity_path: tests/scenes.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: [make_map, make_frame]
# entity_dependencies: [numpy]
# ---

"""Random Gaussian maps and self-rendered frames for tests."""

import numpy as np

from splat_slam.gaussians.model import GaussianMap, colour_to_logit, logit
from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.rendering.rasterizer import render
from splat_slam.settings import RendererSettings
from splat_slam.slam.frame import Frame


def make_map(
    rng: np.random.Generator,
    n: int,
    depth: tuple[float, float] = (2.0, 3.0),
    spread: float = 0.4,
    scale: tuple[float, float] = (0.05, 0.2),
    opacity: tuple[float, float] = (0.3, 0.9),
) -> GaussianMap:
    """Random anisotropic Gaussians in front of an identity camera."""
    gaussian_map = GaussianMap.empty(0)
    z = rng.uniform(*depth, size=n)
    xy = rng.uniform(-spread, spread, size=(n, 2)) * z[:, None] / depth[1]
    q = rng.standard_normal((n, 4))
    gaussian_map.append(
        np.column_stack([xy, z]),
        np.log(rng.uniform(*scale, size=(n, 3))),
        q,
        logit(rng.uniform(*opacity, size=n)),
        colour_to_logit(rng.uniform(0.05, 0.95, size=(n, 3))),
        origin_keyframe=0,
    )
    return gaussian_map


def make_frame(
    gaussian_map: GaussianMap,
    pose: SE3Pose,
    K: CameraIntrinsics,
    index: int = 0,
    settings: RendererSettings | None = None,
) -> Frame:
    """Frame whose colour and depth are an exact render of the map at pose."""
    output = render(gaussian_map, pose, K, record_contributors=False, settings=settings)
    return Frame(index, index / 30.0, output.colour, K, output.depth)
