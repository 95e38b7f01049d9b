# ---
# entity_id: test-evaluation-report
# entity_name: Metric Report Tests
# entity_type_id: module
# entity_path: tests/evaluation/test_report.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.evaluation, pytest]
# ---

"""Tests for key=value reports and error CSVs."""

import math
from pathlib import Path

from splat_slam.evaluation.report import (
    funnel_record,
    report_lines,
    summary_record,
    write_errors_csv,
    write_report,
)
from splat_slam.models import AteReport, FunnelReport, RenderingMetrics, RingResult, RunSummary


class TestReportLines:
    """Tests for value formatting."""

    def test_formats(self) -> None:
        """Test floats use six decimals, booleans are lower case and inf is spelled out."""
        lines = report_lines({"ate_rmse": 0.0, "frames": 3, "ok": True, "psnr": math.inf})
        assert lines == ["ate_rmse=0.000000", "frames=3", "ok=true", "psnr=inf"]


class TestRecords:
    """Tests for report assembly."""

    def test_summary_with_metrics(self) -> None:
        """Test trajectory and rendering metrics are appended to the run counts."""
        ate = AteReport(
            rmse=0.01,
            errors=[0.01, 0.01],
            rotation=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation=[0.0, 0.0, 0.0],
        )
        summary = RunSummary(
            frames=10,
            keyframes=3,
            gaussians=500,
            ate=ate,
            rendering=RenderingMetrics(psnr=30.0, ssim=0.9, frames=[5]),
        )
        record = summary_record(summary)
        assert record["frames"] == 10
        assert record["ate_rmse"] == 0.01
        assert record["ate_poses"] == 2
        assert record["rendered_frames"] == 1

    def test_summary_without_metrics(self) -> None:
        """Test a run without ground truth reports counts only."""
        record = summary_record(RunSummary(frames=1, keyframes=1, gaussians=0))
        assert "ate_rmse" not in record
        assert "psnr" not in record

    def test_funnel(self) -> None:
        """Test the overall rate pools starts across rings."""
        rings = [
            RingResult(radius=0.2, starts=4, successes=4),
            RingResult(radius=1.2, starts=4, successes=0),
        ]
        record = funnel_record(FunnelReport(with_depth=False, iterations=10, rings=rings))
        assert record["success_rate"] == 0.5
        assert record["success_rate_r0.2"] == 1.0
        assert record["success_rate_r1.2"] == 0.0


class TestWriters:
    """Tests for file output."""

    def test_write_report(self, tmp_path: Path) -> None:
        """Test one line per metric with a trailing newline."""
        path = tmp_path / "out" / "metrics.txt"
        write_report(path, {"ate_rmse": 0.5})
        assert path.read_text() == "ate_rmse=0.500000\n"

    def test_write_errors_csv(self, tmp_path: Path) -> None:
        """Test the header and six-decimal rows."""
        path = tmp_path / "errors.csv"
        write_errors_csv(path, [0.0, 0.033333], [0.001, 0.0025])
        lines = path.read_text().splitlines()
        assert lines == ["timestamp,error_m", "0.000000,0.001000", "0.033333,0.002500"]
