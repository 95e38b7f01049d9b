# ---
# entity_id: module-errors
# entity_name: Error Hierarchy
# entity_type_id: module
# entity_path: splat_slam/errors.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T09:00:00Z
# entity_exports: [SplatSlamError, ConfigError, DatasetError, TrackingLost]
# entity_dependencies: []
# entity_callers: [geometry, gaussians, rendering, optim, slam, datasets, evaluation, cli]
# entity_callees: []
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Exception hierarchy.

Each failure family has an intermediate base so the CLI can map whole
families onto exit codes (config 2, dataset/IO 3, tracking lost 4).
"""

from pathlib import Path


class SplatSlamError(Exception):
    """Base class for every error raised by splat_slam."""


class ConfigError(SplatSlamError):
    """Configuration could not be parsed or validated."""

    def __init__(self, message: str, keys: list[str] | None = None):
        super().__init__(message)
        self.keys = keys or []


# === Geometry ===


class GeometryError(SplatSlamError):
    pass


class NonPositiveDepth(GeometryError):
    """A camera-frame point is at or behind the minimum projection depth."""

    def __init__(self, z: float):
        super().__init__(f"camera-frame depth {z:.3e} m is not positive")
        self.z = z


# === Map ===


class MapError(SplatSlamError):
    pass


class EmptyMapBootstrap(MapError):
    """No rendered depth is available, bootstrap depth statistics apply."""


class EmptyMap(MapError):
    """An operation needs at least one Gaussian."""


# === Rendering ===


class RenderError(SplatSlamError):
    pass


class MissingContributors(RenderError):
    """backward() was given a render that did not record contributors."""


# === Optimisation ===


class OptimizationError(SplatSlamError):
    pass


class EmptyMask(OptimizationError):
    """A loss mask selected no pixels."""


class ShapeMismatch(OptimizationError):
    def __init__(self, name: str, expected: tuple[int, ...], got: tuple[int, ...]):
        super().__init__(f"{name}: expected shape {expected}, got {got}")
        self.name = name


class InvalidBudget(OptimizationError):
    pass


# === Tracking ===


class TrackingError(SplatSlamError):
    pass


class DivergedPose(TrackingError):
    """Tracking loss became non-finite or grew past the divergence factor."""

    def __init__(self, iteration: int, loss: float):
        super().__init__(f"pose diverged at iteration {iteration} (loss={loss:.6g})")
        self.iteration = iteration
        self.loss = loss


class TrackingLost(TrackingError):
    """Too many consecutive frames failed to track."""


# === Datasets ===


class DatasetError(SplatSlamError):
    pass


class MissingIndexFile(DatasetError):
    def __init__(self, path: Path):
        super().__init__(f"missing index file: {path}")
        self.path = path


class ImageDecodeError(DatasetError):
    def __init__(self, path: Path, reason: str = "could not decode image"):
        super().__init__(f"{reason}: {path}")
        self.path = path


class TimestampOrderError(DatasetError):
    pass


class TrajectoryFormatError(DatasetError):
    pass


class MapFormatError(DatasetError):
    """A PLY file is unreadable or lacks the Gaussian vertex layout."""


# === Evaluation ===


class EvaluationError(SplatSlamError):
    pass


class LengthMismatch(EvaluationError):
    pass


class DegenerateGeometry(EvaluationError):
    pass
