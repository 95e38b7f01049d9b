# ---
# entity_id: test-datasets-tum
# entity_name: TUM Reader Tests
# entity_type_id: module
# entity_path: tests/datasets/test_tum.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.datasets, pytest]
# ---

"""
Tests for the TUM RGB-D directory reader.

Test coverage:
- Greedy timestamp association
- Index parsing and ordering errors
- RGB-only frames when depth is too far away in time
- Export of a synthetic scene and reading it back
"""

from pathlib import Path

import numpy as np
import pytest

from splat_slam.datasets.synthetic import SyntheticSpec, generate_synthetic
from splat_slam.datasets.tum import associate, default_intrinsics, export_tum, load_tum, read_index
from splat_slam.errors import ImageDecodeError, MissingIndexFile, TimestampOrderError
from splat_slam.rendering.image_io import save_colour_png


def _write_sequence(root: Path, rgb_times: list[float], depth_times: list[float]) -> None:
    image = np.full((8, 8, 3), 0.5)
    rgb_lines = ["# color images"]
    for t in rgb_times:
        save_colour_png(root / "rgb" / f"{t:.6f}.png", image)
        rgb_lines.append(f"{t:.6f} rgb/{t:.6f}.png")
    (root / "rgb.txt").write_text("\n".join(rgb_lines) + "\n")
    if depth_times:
        depth_lines = [f"{t:.6f} depth/{t:.6f}.png" for t in depth_times]
        (root / "depth.txt").write_text("\n".join(depth_lines) + "\n")


class TestAssociate:
    """Tests for nearest-timestamp matching."""

    def test_exact(self) -> None:
        """Test equal timestamps pair up in order."""
        assert associate([0.0, 1.0], [0.0, 1.0]) == {0: 0, 1: 1}

    def test_closest_wins(self) -> None:
        """Test each second index is used once, by its closest partner."""
        assert associate([0.0, 0.01], [0.009]) == {1: 0}

    def test_outside_tolerance(self) -> None:
        """Test a 0.05 s gap is not matched."""
        assert associate([0.0], [0.05]) == {}

    def test_empty(self) -> None:
        """Test an empty side gives no matches."""
        assert associate([], [1.0]) == {}


class TestReadIndex:
    """Tests for rgb.txt / depth.txt parsing."""

    def test_missing(self, tmp_path: Path) -> None:
        """Test a missing index raises MissingIndexFile naming it."""
        with pytest.raises(MissingIndexFile, match="rgb.txt"):
            read_index(tmp_path / "rgb.txt")

    def test_not_increasing(self, tmp_path: Path) -> None:
        """Test repeated timestamps raise TimestampOrderError."""
        path = tmp_path / "rgb.txt"
        path.write_text("1.0 a.png\n1.0 b.png\n")
        with pytest.raises(TimestampOrderError):
            read_index(path)

    def test_comments(self, tmp_path: Path) -> None:
        """Test header comments are skipped."""
        path = tmp_path / "rgb.txt"
        path.write_text("# color images\n# timestamp filename\n0.5 rgb/a.png\n")
        assert read_index(path) == [(0.5, "rgb/a.png")]


class TestLoadTum:
    """Tests for sequence indexing."""

    def test_missing_rgb_index(self, tmp_path: Path) -> None:
        """Test a directory without rgb.txt raises MissingIndexFile."""
        with pytest.raises(MissingIndexFile):
            load_tum(tmp_path)

    def test_missing_image(self, tmp_path: Path) -> None:
        """Test an indexed but absent image raises ImageDecodeError."""
        (tmp_path / "rgb.txt").write_text("0.0 rgb/none.png\n")
        with pytest.raises(ImageDecodeError, match="none.png"):
            load_tum(tmp_path)

    def test_rgb_only_when_depth_far(self, tmp_path: Path) -> None:
        """Test a depth image 0.05 s away leaves the frame RGB-only."""
        _write_sequence(tmp_path, [0.0, 1.0], [0.05, 1.0])
        source = load_tum(tmp_path)
        assert len(source) == 2
        assert source.entries[0].depth_path is None
        assert source.entries[1].depth_path == tmp_path / "depth/1.000000.png"
        frame = source.frame(0)
        assert frame.depth is None
        assert frame.rgb.shape == (8, 8, 3)

    def test_no_depth_index(self, tmp_path: Path) -> None:
        """Test a sequence without depth.txt is RGB-only."""
        _write_sequence(tmp_path, [0.0], [])
        assert not load_tum(tmp_path).has_depth

    def test_default_intrinsics_from_name(self, tmp_path: Path) -> None:
        """Test the freiburg id in the directory name picks published intrinsics."""
        K = default_intrinsics(tmp_path / "rgbd_dataset_freiburg1_desk")
        assert (K.fx, K.fy, K.cx, K.cy) == (517.3, 516.5, 318.6, 255.3)
        assert (K.width, K.height) == (640, 480)

    def test_export_and_load(self, tmp_path: Path) -> None:
        """Test an exported synthetic scene reads back at 8-bit and 1/5000 m precision."""
        scene = generate_synthetic(
            SyntheticSpec(n_gaussians=20, n_frames=3, width=16, height=12, quantize=True)
        )
        export_tum(scene, tmp_path)
        source = load_tum(tmp_path)
        assert source.timestamps == scene.timestamps
        assert source.intrinsics == scene.intrinsics
        assert source.ground_truth is not None
        for expected, pose in zip(scene.poses, source.ground_truth[1], strict=True):
            assert pose.allclose(expected, atol=1e-5)
        for original, frame in zip(scene.frames, source, strict=True):
            np.testing.assert_allclose(frame.rgb, original.rgb, atol=1e-9)
            assert frame.depth is not None and original.depth is not None
            np.testing.assert_allclose(frame.depth, original.depth, atol=1e-9)

    def test_downscale(self, tmp_path: Path) -> None:
        """Test stride subsampling of images and intrinsics."""
        _write_sequence(tmp_path, [0.0], [])
        source = load_tum(tmp_path, downscale=2)
        assert source.frame(0).rgb.shape == (4, 4, 3)
        assert source.intrinsics.width == 320
