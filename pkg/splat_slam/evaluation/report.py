# ---
# entity_id: module-evaluation-report
# entity_name: Metric Reports
# entity_type_id: module
# entity_path: splat_slam/evaluation/report.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T11:00:00Z
# entity_exports: [report_lines, summary_record, funnel_record, write_report, write_errors_csv]
# entity_dependencies: []
# entity_callers: [cli]
# entity_callees: []
# entity_semver_impact: minor
# entity_breaking_change_risk: low
# ---

"""Line-oriented key=value metric reports and per-frame error CSVs."""

from __future__ import annotations

import csv
import math
from collections.abc import Mapping, Sequence
from pathlib import Path

from splat_slam.models import AteReport, FunnelReport, RenderingMetrics, RunSummary

Record = Mapping[str, float | int | bool | str]


def _format(value: float | int | bool | str) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.6f}"
    return str(value)


def report_lines(record: Record) -> list[str]:
    """One "key=value" line per metric, floats with six decimals."""
    return [f"{key}={_format(value)}" for key, value in record.items()]


def ate_record(report: AteReport) -> dict[str, float | int | bool | str]:
    return {
        "ate_rmse": report.rmse,
        "ate_poses": report.count,
        "ate_scale": report.scale,
        "scale_aligned": report.scale_aligned,
    }


def rendering_record(metrics: RenderingMetrics) -> dict[str, float | int | bool | str]:
    return {"psnr": metrics.psnr, "ssim": metrics.ssim, "rendered_frames": len(metrics.frames)}


def funnel_record(report: FunnelReport) -> dict[str, float | int | bool | str]:
    record: dict[str, float | int | bool | str] = {
        "with_depth": report.with_depth,
        "iterations": report.iterations,
        "success_rate": report.success_rate,
    }
    for ring in report.rings:
        record[f"success_rate_r{ring.radius:g}"] = ring.success_rate
    return record


def summary_record(summary: RunSummary) -> dict[str, float | int | bool | str]:
    record: dict[str, float | int | bool | str] = {
        "frames": summary.frames,
        "keyframes": summary.keyframes,
        "gaussians": summary.gaussians,
        "tracking_failures": summary.tracking_failures,
    }
    if summary.ate is not None:
        record.update(ate_record(summary.ate))
    if summary.rendering is not None:
        record.update(rendering_record(summary.rendering))
    return record


def write_report(path: Path, record: Record) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(report_lines(record)) + "\n", encoding="utf-8")


def write_errors_csv(path: Path, timestamps: Sequence[float], errors: Sequence[float]) -> None:
    """Per-pose aligned position errors as (timestamp, error_m) rows."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["timestamp", "error_m"])
        for timestamp, error in zip(timestamps, errors, strict=True):
            writer.writerow([f"{timestamp:.6f}", f"{error:.6f}"])
