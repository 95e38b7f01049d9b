# ---
# entity_id: module-splat-slam-models
# entity_name: Report Models
# entity_type_id: module
# entity_path: splat_slam/models.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-27T09:00:00Z
# entity_exports: [MappingSummary, AteReport, RenderingMetrics, FunnelReport, RunSummary]
# entity_dependencies: [pydantic]
# entity_callers: [mapper, pipeline, evaluation, cli]
# entity_callees: []
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Data models for run summaries and evaluation reports.
"""

from pydantic import BaseModel, ConfigDict, Field


class MappingSummary(BaseModel):
    """Outcome of one keyframe's mapping run."""

    keyframe_id: int
    iterations: int = Field(ge=0)
    initial_loss: float
    final_loss: float
    pruned: int = Field(default=0, ge=0)
    gaussians: int = Field(ge=0)
    window: list[int] = Field(default_factory=list)


class AteReport(BaseModel):
    """Absolute trajectory error after least-squares alignment."""

    model_config = ConfigDict(frozen=True)

    rmse: float = Field(ge=0.0, description="Metres")
    errors: list[float] = Field(default_factory=list, description="Per-pose aligned error, m")
    rotation: list[list[float]]
    translation: list[float]
    scale: float = 1.0
    scale_aligned: bool = False

    @property
    def count(self) -> int:
        return len(self.errors)


class RenderingMetrics(BaseModel):
    """Mean PSNR / SSIM over the evaluated frames."""

    psnr: float
    ssim: float
    frames: list[int] = Field(default_factory=list)


class RingResult(BaseModel):
    """Funnel outcome for the starts on one ring."""

    radius: float
    starts: int = Field(ge=0)
    successes: int = Field(ge=0)
    translation_errors: list[float] = Field(default_factory=list)
    rotation_errors_deg: list[float] = Field(default_factory=list)

    @property
    def success_rate(self) -> float:
        return self.successes / self.starts if self.starts else 0.0


class FunnelReport(BaseModel):
    with_depth: bool
    iterations: int
    rings: list[RingResult] = Field(default_factory=list)

    @property
    def success_rate(self) -> float:
        starts = sum(ring.starts for ring in self.rings)
        return sum(ring.successes for ring in self.rings) / starts if starts else 0.0


class RunSummary(BaseModel):
    """What `run` reports after a sequence."""

    frames: int = Field(ge=0)
    keyframes: int = Field(ge=0)
    gaussians: int = Field(ge=0)
    tracking_failures: int = Field(default=0, ge=0)
    ate: AteReport | None = None
    rendering: RenderingMetrics | None = None
