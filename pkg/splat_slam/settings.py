# ---
# entity_id: module-slam-settings
# entity_name: SLAM Configuration
# entity_type_id: module
# entity_path: splat_slam/settings.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-24T09:00:00Z
# entity_exports: [SlamConfig, RuntimeSettings, get_settings, load_config, dump_config]
# entity_dependencies: [pydantic, pydantic_settings, yaml]
# entity_callers: [slam, evaluation, cli]
# entity_callees: []
# entity_semver_impact: major
# entity_breaking_change_risk: high
# ---

"""
Centralized configuration - single source of truth for every hyperparameter.

This module provides:
- SlamConfig: pydantic sections holding all tunables with their defaults
- YAML loading that rejects unknown keys and names them
- Dataset presets (replica / tum) for the keyframe thresholds
- RuntimeSettings: environment-driven knobs (threads, logging)

Usage:
    from splat_slam.settings import load_config

    config = load_config(Path("config.yaml"), preset="tum")
    config.keyframes.kf_cov
"""

from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from splat_slam.errors import ConfigError


class Mode(str, Enum):
    MONOCULAR = "monocular"
    RGBD = "rgbd"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GaussianSettings(_Section):
    """Insertion and pruning of Gaussians."""

    insertion_stride: int = Field(default=4, ge=1, description="Pixel stride for insertion")
    initial_opacity: float = Field(default=0.5, gt=0.0, lt=1.0)
    tau_opaque: float = Field(
        default=0.5, ge=0.0, le=1.0, description="Accumulated opacity marking a depth estimate"
    )
    bootstrap_depth: float = Field(default=2.0, gt=0.0, description="First-frame median depth, m")
    bootstrap_depth_std: float = Field(default=0.5, ge=0.0, description="First-frame depth std")
    valid_depth_std_factor: float = Field(default=0.2, ge=0.0)
    invalid_depth_std_factor: float = Field(default=0.5, ge=0.0)
    prune_opacity: float = Field(default=0.7, ge=0.0, le=1.0)
    prune_min_observers: int = Field(default=3, ge=0)
    prune_recent_keyframes: int = Field(default=3, ge=1)
    use_pruning: bool = True


class RendererSettings(_Section):
    """Rasterizer constants."""

    tile_size: int = Field(default=16, ge=1)
    alpha_min: float = Field(default=1.0 / 255.0, ge=0.0, lt=1.0)
    alpha_max: float = Field(default=0.99, gt=0.0, lt=1.0)
    transmittance_min: float = Field(default=1e-4, ge=0.0, lt=1.0)
    dilation: float = Field(default=0.3, ge=0.0, description="Low-pass dilation, px^2")
    z_near: float = Field(default=0.01, gt=0.0, description="Frustum near plane, m")
    max_contributors: int = Field(default=256, ge=1)


class LossSettings(_Section):
    lambda_pho: float = Field(default=0.9, ge=0.0, le=1.0)
    lambda_iso: float = Field(default=10.0, ge=0.0)
    l1_smoothing: float = Field(default=1e-6, gt=0.0)


class OptimizerSettings(_Section):
    """Adam hyperparameters and per-group learning rates."""

    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
    lr_translation: float = Field(default=0.001, ge=0.0)
    lr_rotation: float = Field(default=0.003, ge=0.0)
    lr_exposure: float = Field(default=0.01, ge=0.0)
    lr_position: float = Field(default=1.6e-4, ge=0.0)
    lr_colour: float = Field(default=2.5e-3, ge=0.0)
    lr_opacity: float = Field(default=5e-2, ge=0.0)
    lr_scale: float = Field(default=5e-3, ge=0.0)
    lr_quaternion: float = Field(default=1e-3, ge=0.0)
    monocular_position_factor: float = Field(default=10.0, gt=0.0)


class TrackingSettings(_Section):
    max_iterations: int = Field(default=100, ge=1)
    convergence_threshold: float = Field(default=1e-4, gt=0.0)
    divergence_factor: float = Field(default=10.0, gt=1.0)
    opacity_mask: float = Field(default=0.95, ge=0.0, le=1.0)
    use_depth: bool = True
    max_consecutive_failures: int = Field(default=3, ge=0)


class KeyframeSettings(_Section):
    kf_cov: float = Field(default=0.95, ge=0.0, le=1.0, description="IOU registration threshold")
    kf_m: float = Field(default=0.04, ge=0.0, description="Baseline / median depth threshold")
    kf_c: float = Field(default=0.3, ge=0.0, le=1.0, description="OC window cutoff")
    window_size: int = Field(default=10, ge=1)
    random_past: int = Field(default=2, ge=0)
    use_covisibility: bool = True
    fixed_interval: int = Field(
        default=5, ge=1, description="Keyframe interval when covisibility is off"
    )


class MappingSettings(_Section):
    iterations: int = Field(default=150, ge=1)
    interleaved_iterations: int = Field(default=60, ge=1)
    use_isotropic: bool = True
    publish_every: int = Field(default=10, ge=1)


class DatasetSettings(_Section):
    depth_scale: float = Field(default=5000.0, gt=0.0)
    max_time_difference: float = Field(default=0.02, gt=0.0)


class FunnelSettings(_Section):
    square_width: float = Field(default=0.5, gt=0.0)
    rings: list[float] = Field(default_factory=lambda: [0.2, 0.4, 0.8, 1.2])
    starts_per_ring: int = Field(default=32, ge=1)
    iterations: int = Field(default=1000, ge=1)
    success_threshold: float = Field(default=0.01, gt=0.0, description="Final error, m")
    training_iterations: int = Field(default=300, ge=1)
    with_depth: bool = True
    plane_depth: float = Field(default=1.5, gt=0.0)
    n_gaussians: int = Field(default=600, ge=1)
    width: int = Field(default=64, ge=8)
    height: int = Field(default=48, ge=8)


class SlamConfig(BaseModel):
    """Complete run configuration. Every field has its published default."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    mode: Mode = Mode.RGBD
    seed: int = 0
    downscale: int = Field(default=1, ge=1)
    output_dir: Path = Path("output")
    interleaved: bool = False

    gaussians: GaussianSettings = Field(default_factory=GaussianSettings)
    renderer: RendererSettings = Field(default_factory=RendererSettings)
    losses: LossSettings = Field(default_factory=LossSettings)
    optimizer: OptimizerSettings = Field(default_factory=OptimizerSettings)
    tracking: TrackingSettings = Field(default_factory=TrackingSettings)
    keyframes: KeyframeSettings = Field(default_factory=KeyframeSettings)
    mapping: MappingSettings = Field(default_factory=MappingSettings)
    dataset: DatasetSettings = Field(default_factory=DatasetSettings)
    funnel: FunnelSettings = Field(default_factory=FunnelSettings)

    @property
    def is_monocular(self) -> bool:
        return self.mode == Mode.MONOCULAR

    @property
    def mapping_budget(self) -> int:
        """Per-keyframe mapping iterations for the current pipeline mode."""
        if self.interleaved:
            return self.mapping.interleaved_iterations
        return self.mapping.iterations


Preset = Literal["replica", "tum"]

PRESETS: dict[str, dict[str, Any]] = {
    "replica": {"keyframes": {"kf_cov": 0.95, "kf_m": 0.04, "window_size": 10}},
    "tum": {"keyframes": {"kf_cov": 0.90, "kf_m": 0.08, "window_size": 8}},
}


def _merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def config_from_dict(data: dict[str, Any], preset: Preset | None = None) -> SlamConfig:
    """Validate a raw mapping into a SlamConfig.

    Raises:
        ConfigError: naming every rejected key.
    """
    if preset is not None:
        data = _merge(PRESETS[preset], data)
    try:
        return SlamConfig.model_validate(data)
    except ValidationError as exc:
        keys = [".".join(str(part) for part in err["loc"]) for err in exc.errors()]
        details = "; ".join(
            f"{key}: {err['msg']}" for key, err in zip(keys, exc.errors(), strict=True)
        )
        raise ConfigError(f"invalid configuration: {details}", keys=keys) from exc


def load_config(path: Path | None, preset: Preset | None = None) -> SlamConfig:
    """Load a YAML config file. An empty file, or no file, yields the defaults."""
    if path is None:
        return config_from_dict({}, preset)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping of sections")
    return config_from_dict(raw, preset)


def dump_config(config: SlamConfig) -> str:
    """Serialise the effective configuration as YAML."""
    data = config.model_dump(mode="json")
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


class RuntimeSettings(BaseSettings):
    """
    Process-level settings loaded from environment variables.

    Configuration precedence (highest to lowest):
    1. Environment variables (SPLATSLAM_*)
    2. .env file
    3. Default values
    """

    model_config = SettingsConfigDict(
        env_prefix="SPLATSLAM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    threads: int = Field(default=1, ge=1, le=256, description="Cap on tile parallelism")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="INFO")
    log_file: Path | None = Field(default=None, description="JSON-lines log destination")
    log_json: bool = Field(default=False, description="JSON console output")


@lru_cache
def get_settings() -> RuntimeSettings:
    """
    Get cached runtime settings.

    Call get_settings.cache_clear() to reload.
    """
    return RuntimeSettings()
