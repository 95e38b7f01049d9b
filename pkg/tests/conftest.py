# ---
# entity_id: test-conftest
# entity_name: Shared Test Fixtures
# entity_type_id: module
# entity_path: tests/conftest.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# entity_exports: []
# entity_dependencies: [pytest, numpy]
# ---

"""Shared fixtures: small cameras, a seeded generator and quiet logging."""

import numpy as np
import pytest

from splat_slam.geometry.camera import CameraIntrinsics
from splat_slam.logging import LogLevel, setup_logging
from splat_slam.settings import get_settings


@pytest.fixture(autouse=True)
def _quiet_logging() -> None:
    setup_logging(LogLevel.WARNING)
    get_settings.cache_clear()


@pytest.fixture
def small_camera() -> CameraIntrinsics:
    return CameraIntrinsics(fx=30.0, fy=30.0, cx=15.5, cy=15.5, width=32, height=32)


@pytest.fixture
def scene_camera() -> CameraIntrinsics:
    return CameraIntrinsics(fx=50.0, fy=50.0, cx=31.5, cy=23.5, width=64, height=48)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
