# ---
# entity_id: module-cli
# entity_name: Splat SLAM CLI
# entity_type_id: module
# entity_path: splat_slam/cli.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T14:00:00Z
# entity_exports: [cli, run, render, evaluate, funnel, dump_config_command, synth]
# entity_dependencies: [click, rich, tqdm]
# entity_callers: []
# entity_callees: [SlamPipeline, load_tum, render, ate_rmse, run_funnel, generate_synthetic]
# entity_semver_impact: major
# entity_breaking_change_risk: medium
# ---

"""
Command-line entry points.

Provides commands for:
- run: SLAM on a TUM-layout sequence, writing trajectory, map and metrics
- render: images of an exported map at the poses of a trajectory file
- eval: ATE between two trajectory files
- funnel: convergence-basin benchmark on a synthetic plane
- dump-config: the effective configuration as YAML
- synth: generate a synthetic sequence in TUM layout

Exit codes: 2 configuration error, 3 unusable input, 4 tracking lost.
"""

import math
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.markup import escape
from rich.table import Table
from tqdm import tqdm

from splat_slam import __version__
from splat_slam.datasets.synthetic import SyntheticSpec, TrajectoryKind, generate_synthetic
from splat_slam.datasets.trajectory import load_trajectory, save_trajectory
from splat_slam.datasets.tum import default_intrinsics, export_tum, load_tum, read_calibration
from splat_slam.errors import (
    ConfigError,
    DatasetError,
    EvaluationError,
    TrackingLost,
)
from splat_slam.evaluation.ate import ate_rmse, match_trajectories
from splat_slam.evaluation.funnel import run_funnel
from splat_slam.evaluation.image_metrics import evaluate_rendering
from splat_slam.evaluation.report import (
    ate_record,
    funnel_record,
    report_lines,
    summary_record,
    write_errors_csv,
    write_report,
)
from splat_slam.gaussians.ply import load_ply, save_ply
from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.geometry.lie import SE3Pose
from splat_slam.logging import LogLevel, get_logger, setup_logging
from splat_slam.models import AteReport, FunnelReport, RunSummary
from splat_slam.rendering.image_io import save_colour_png
from splat_slam.rendering.rasterizer import render as render_map
from splat_slam.settings import (
    Mode,
    Preset,
    SlamConfig,
    config_from_dict,
    dump_config,
    get_settings,
    load_config,
)
from splat_slam.slam.pipeline import SlamPipeline

console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)

EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_TRACKING = 4

TRAJECTORY_FILE = "trajectory.txt"
MAP_FILE = "map.ply"
METRICS_FILE = "metrics.txt"


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map error families onto process exit codes."""
    try:
        yield
    except ConfigError as exc:
        _fail(exc, EXIT_CONFIG)
    except (DatasetError, EvaluationError, OSError) as exc:
        _fail(exc, EXIT_INPUT)
    except TrackingLost as exc:
        _fail(exc, EXIT_TRACKING)


def _fail(exc: Exception, code: int) -> None:
    message = escape(str(exc))
    err_console.print(f"[bold red]error:[/bold red] {message}", highlight=False, soft_wrap=True)
    logger.error("command failed", error=type(exc).__name__, exit_code=code)
    sys.exit(code)


def _load(
    config_path: Path | None,
    preset: Preset | None,
    **overrides: Any,
) -> SlamConfig:
    """Config file, then preset, then command-line overrides that were given."""
    config = load_config(config_path, preset)
    given = {key: value for key, value in overrides.items() if value is not None}
    if not given:
        return config
    return config_from_dict({**config.model_dump(mode="json"), **given})


config_option = click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="YAML configuration file",
)
preset_option = click.option(
    "--preset",
    type=click.Choice(["replica", "tum"]),
    help="Dataset keyframe thresholds",
)
seed_option = click.option("--seed", type=int, help="Random seed")


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--log-level",
    type=click.Choice([level.value for level in LogLevel]),
    help="Console log level (default from SPLATSLAM_LOG_LEVEL)",
)
def cli(log_level: str | None) -> None:
    """Gaussian-splatting SLAM on RGB-D and monocular sequences."""
    settings = get_settings()
    setup_logging(
        LogLevel(log_level or settings.log_level),
        log_file=settings.log_file,
        json_console=settings.log_json,
    )


@cli.command()
@click.argument("dataset", type=click.Path(path_type=Path))
@config_option
@preset_option
@click.option("--mode", type=click.Choice([mode.value for mode in Mode]), help="Sensor mode")
@seed_option
@click.option("--downscale", type=int, help="Integer resolution divisor")
@click.option("--out", "-o", "output_dir", type=click.Path(path_type=Path), help="Output dir")
@click.option("--interleaved/--sequential", default=None, help="Map on a worker thread")
@click.option("--all-frames", is_flag=True, help="Write and evaluate every tracked pose")
@click.option("--max-frames", type=int, help="Stop after this many frames")
def run(
    dataset: Path,
    config_path: Path | None,
    preset: Preset | None,
    mode: str | None,
    seed: int | None,
    downscale: int | None,
    output_dir: Path | None,
    interleaved: bool | None,
    all_frames: bool,
    max_frames: int | None,
) -> None:
    """Run SLAM on a TUM-layout sequence."""
    with _exit_codes():
        config = _load(
            config_path,
            preset,
            mode=mode,
            seed=seed,
            downscale=downscale,
            output_dir=str(output_dir) if output_dir else None,
            interleaved=interleaved,
        )
        source = load_tum(
            dataset,
            config.downscale,
            config.dataset.max_time_difference,
            config.dataset.depth_scale,
        )
        if not config.is_monocular and not source.has_depth:
            raise DatasetError(f"{dataset}: rgbd mode needs depth.txt")

        count = len(source) if max_frames is None else min(max_frames, len(source))
        frames = (source.frame(i) for i in range(count))
        threads = get_settings().threads
        pipeline = SlamPipeline(config, threads=threads)
        result = pipeline.run(tqdm(frames, total=count, desc="frames", unit="frame"))

        out = config.output_dir
        timestamps, poses = result.trajectory(keyframes_only=not all_frames)
        save_trajectory(timestamps, poses, out / TRAJECTORY_FILE)
        save_ply(result.gaussian_map, out / MAP_FILE)

        ate = None
        if source.ground_truth is not None:
            ate = _trajectory_error((timestamps, poses), source.ground_truth, config)
        rendering = evaluate_rendering(
            result.gaussian_map, result.held_out(), config.renderer, threads
        )
        summary = result.summary().model_copy(update={"ate": ate, "rendering": rendering})
        write_report(out / METRICS_FILE, summary_record(summary))
        _print_summary(summary, out)


def _trajectory_error(
    estimated: tuple[list[float], list[SE3Pose]],
    reference: tuple[list[float], list[SE3Pose]],
    config: SlamConfig,
) -> AteReport | None:
    _, est, ref = match_trajectories(estimated, reference, config.dataset.max_time_difference)
    if len(est) < 2:
        logger.warning("too few poses matched ground truth", matched=len(est))
        return None
    return ate_rmse(est, ref, with_scale=config.is_monocular)


def _print_summary(summary: RunSummary, out: Path) -> None:
    table = Table(title="SLAM run", show_header=True, header_style="bold cyan")
    table.add_column("metric")
    table.add_column("value", justify="right")
    for key, value in summary_record(summary).items():
        table.add_row(key, report_lines({key: value})[0].split("=", 1)[1])
    console.print(table)
    console.print(f"outputs written to [bold]{out}[/bold]")


@cli.command()
@click.argument("ply", type=click.Path(path_type=Path))
@click.argument("poses", type=click.Path(path_type=Path))
@click.argument("out", type=click.Path(path_type=Path))
@click.option(
    "--calibration",
    type=click.Path(path_type=Path),
    help="calibration.yaml with fx, fy, cx, cy, width, height",
)
@click.option("--downscale", type=int, default=1, show_default=True)
def render(ply: Path, poses: Path, out: Path, calibration: Path | None, downscale: int) -> None:
    """Render an exported map at every pose of a trajectory file."""
    if downscale < 1:
        raise click.BadParameter("must be at least 1", param_hint="--downscale")
    with _exit_codes():
        gaussian_map = load_ply(ply)
        timestamps, trajectory = load_trajectory(poses)
        K: CameraIntrinsics = (
            read_calibration(calibration) if calibration else default_intrinsics(Path())
        )
        if downscale > 1:
            K = K.downscaled(downscale)
        settings = get_settings()
        out.mkdir(parents=True, exist_ok=True)
        for index, pose in enumerate(tqdm(trajectory, desc="views", unit="view")):
            output = render_map(
                gaussian_map,
                pose,
                K,
                with_depth=False,
                record_contributors=False,
                threads=settings.threads,
            )
            save_colour_png(out / f"{index:06d}.png", output.colour)
        logger.info("rendered views", views=len(timestamps), out=str(out))
        console.print(f"rendered {len(timestamps)} views to [bold]{out}[/bold]")


@cli.command("eval")
@click.argument("estimated", type=click.Path(path_type=Path))
@click.argument("reference", type=click.Path(path_type=Path))
@click.option("--scale-align", is_flag=True, help="Similarity alignment (monocular runs)")
@click.option("--csv", "csv_path", type=click.Path(path_type=Path), help="Per-pose error CSV")
@click.option("--max-difference", type=float, default=0.02, show_default=True)
def evaluate(
    estimated: Path,
    reference: Path,
    scale_align: bool,
    csv_path: Path | None,
    max_difference: float,
) -> None:
    """ATE RMSE of an estimated trajectory against ground truth."""
    with _exit_codes():
        est = load_trajectory(estimated)
        ref = load_trajectory(reference)
        timestamps, est_poses, ref_poses = match_trajectories(est, ref, max_difference)
        report = ate_rmse(est_poses, ref_poses, with_scale=scale_align)
        for line in report_lines(ate_record(report)):
            click.echo(line)
        if csv_path is not None:
            write_errors_csv(csv_path, timestamps, report.errors)


@cli.command()
@config_option
@seed_option
@click.option("--with-depth/--without-depth", default=None, help="Map initialisation")
@click.option("--starts", type=int, help="Starts per ring")
@click.option("--iterations", type=int, help="Localisation iterations per start")
@click.option("--out", "-o", "report_path", type=click.Path(path_type=Path), help="Report file")
def funnel(
    config_path: Path | None,
    seed: int | None,
    with_depth: bool | None,
    starts: int | None,
    iterations: int | None,
    report_path: Path | None,
) -> None:
    """Convergence-basin benchmark of photometric localisation."""
    with _exit_codes():
        config = _load(config_path, None, seed=seed)
        funnel_updates = {
            key: value
            for key, value in {"starts_per_ring": starts, "iterations": iterations}.items()
            if value is not None
        }
        if funnel_updates:
            config = config_from_dict(
                {
                    **config.model_dump(mode="json"),
                    "funnel": {**config.funnel.model_dump(mode="json"), **funnel_updates},
                }
            )
        spec = SyntheticSpec(
            trajectory=TrajectoryKind.FUNNEL,
            seed=config.seed,
            n_gaussians=config.funnel.n_gaussians,
            funnel=config.funnel,
        )
        scene = generate_synthetic(spec, config.renderer)
        with tqdm(total=config.funnel.training_iterations, desc="training", unit="it") as bar:
            report = run_funnel(scene, config, with_depth, progress=lambda _: bar.update(1))
        _print_funnel(report)
        for line in report_lines(funnel_record(report)):
            click.echo(line)
        if report_path is not None:
            write_report(report_path, funnel_record(report))


def _print_funnel(report: FunnelReport) -> None:
    label = "w/ depth" if report.with_depth else "w/o depth"
    table = Table(title=f"Funnel ({label})", show_header=True, header_style="bold cyan")
    for column in ("radius", "starts", "successes", "success rate", "median rot err (deg)"):
        table.add_column(column, justify="right")
    for ring in report.rings:
        finite = sorted(e for e in ring.rotation_errors_deg if math.isfinite(e))
        median = f"{finite[len(finite) // 2]:.3f}" if finite else "-"
        table.add_row(
            f"{ring.radius:g}",
            str(ring.starts),
            str(ring.successes),
            f"{ring.success_rate:.3f}",
            median,
        )
    console.print(table)


@cli.command("dump-config")
@config_option
@preset_option
def dump_config_command(config_path: Path | None, preset: Preset | None) -> None:
    """Print the effective configuration as YAML."""
    with _exit_codes():
        click.echo(dump_config(load_config(config_path, preset)), nl=False)


@cli.command()
@click.argument("out", type=click.Path(path_type=Path))
@click.option(
    "--trajectory",
    type=click.Choice([kind.value for kind in TrajectoryKind if kind != TrajectoryKind.FUNNEL]),
    default=TrajectoryKind.ORBIT.value,
    show_default=True,
)
@click.option("--frames", type=int, default=30, show_default=True)
@click.option("--gaussians", type=int, default=200, show_default=True)
@click.option("--width", type=int, default=160, show_default=True)
@click.option("--height", type=int, default=120, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def synth(
    out: Path,
    trajectory: str,
    frames: int,
    gaussians: int,
    width: int,
    height: int,
    seed: int,
) -> None:
    """Generate a synthetic RGB-D sequence in TUM layout."""
    with _exit_codes():
        try:
            spec = SyntheticSpec(
                trajectory=TrajectoryKind(trajectory),
                n_frames=frames,
                n_gaussians=gaussians,
                width=width,
                height=height,
                seed=seed,
                quantize=True,
            )
        except ValueError as exc:
            raise click.BadParameter(str(exc)) from exc
        scene = generate_synthetic(spec)
        export_tum(scene, out)
        save_ply(scene.gaussian_map, out / "scene.ply")
        console.print(f"wrote {len(scene.frames)} frames to [bold]{out}[/bold]")


if __name__ == "__main__":
    cli()
