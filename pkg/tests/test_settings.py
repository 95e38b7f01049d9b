# ---
# entity_id: test-settings
# entity_name: Configuration Tests
# entity_type_id: module
# entity_path: tests/test_settings.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [splat_slam.settings, pytest]
# ---

"""
Tests for run configuration and runtime settings.

Test coverage:
- Defaults and the golden YAML dump
- Unknown keys and out-of-range values named in ConfigError
- Presets and file loading
- Environment-driven runtime settings
"""

from pathlib import Path

import pytest
import yaml

from splat_slam.errors import ConfigError
from splat_slam.settings import (
    Mode,
    RuntimeSettings,
    SlamConfig,
    config_from_dict,
    dump_config,
    get_settings,
    load_config,
)

GOLDEN = Path(__file__).parent / "golden" / "default_config.yaml"


class TestSlamConfig:
    """Tests for defaults and validation."""

    def test_defaults(self) -> None:
        """Test the published defaults."""
        config = SlamConfig()
        assert config.mode is Mode.RGBD
        assert config.keyframes.kf_cov == 0.95
        assert config.losses.lambda_iso == 10.0
        assert config.mapping_budget == 150
        assert not config.is_monocular

    def test_interleaved_budget(self) -> None:
        """Test the interleaved driver uses its own mapping budget."""
        assert config_from_dict({"interleaved": True}).mapping_budget == 60

    def test_golden_dump(self) -> None:
        """Test the YAML dump of the defaults matches the golden file."""
        dumped = yaml.safe_load(dump_config(SlamConfig()))
        assert dumped == yaml.safe_load(GOLDEN.read_text())

    def test_dump_round_trip(self, tmp_path: Path) -> None:
        """Test a dumped configuration loads back unchanged."""
        config = config_from_dict({"mode": "monocular", "tracking": {"max_iterations": 7}})
        path = tmp_path / "config.yaml"
        path.write_text(dump_config(config))
        assert load_config(path) == config

    def test_unknown_key(self) -> None:
        """Test an unknown key is rejected and named."""
        with pytest.raises(ConfigError, match="mapping.bogus") as info:
            config_from_dict({"mapping": {"bogus": 1}})
        assert info.value.keys == ["mapping.bogus"]

    def test_out_of_range(self) -> None:
        """Test a value outside its range names the key."""
        with pytest.raises(ConfigError) as info:
            config_from_dict({"losses": {"lambda_pho": 1.5}})
        assert "losses.lambda_pho" in info.value.keys

    def test_assignment_validated(self) -> None:
        """Test section fields are validated on assignment too."""
        config = SlamConfig()
        with pytest.raises(ValueError):
            config.tracking.max_iterations = 0


class TestLoadConfig:
    """Tests for YAML files and presets."""

    def test_no_file(self) -> None:
        """Test no file yields the defaults."""
        assert load_config(None) == SlamConfig()

    def test_empty_file(self, tmp_path: Path) -> None:
        """Test an empty file yields the defaults."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_config(path) == SlamConfig()

    def test_tum_preset(self) -> None:
        """Test the TUM preset relaxes the keyframe thresholds."""
        keyframes = load_config(None, preset="tum").keyframes
        assert (keyframes.kf_cov, keyframes.kf_m, keyframes.window_size) == (0.90, 0.08, 8)

    def test_file_overrides_preset(self, tmp_path: Path) -> None:
        """Test file values win over the preset."""
        path = tmp_path / "config.yaml"
        path.write_text("keyframes:\n  kf_cov: 0.8\n")
        keyframes = load_config(path, preset="tum").keyframes
        assert keyframes.kf_cov == 0.8
        assert keyframes.kf_m == 0.08

    @pytest.mark.parametrize("text", ["- a\n- b\n", "mode: [unclosed\n"])
    def test_bad_file(self, tmp_path: Path, text: str) -> None:
        """Test a non-mapping or unparsable file raises ConfigError."""
        path = tmp_path / "config.yaml"
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)


class TestRuntimeSettings:
    """Tests for environment-driven settings."""

    def test_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test SPLATSLAM_* variables are read and cached."""
        monkeypatch.setenv("SPLATSLAM_THREADS", "4")
        monkeypatch.setenv("SPLATSLAM_LOG_LEVEL", "DEBUG")
        get_settings.cache_clear()
        settings = get_settings()
        assert settings.threads == 4
        assert settings.log_level == "DEBUG"
        assert get_settings() is settings

    def test_thread_bounds(self) -> None:
        """Test thread counts below one are rejected."""
        with pytest.raises(ValueError):
            RuntimeSettings(threads=0)
