# ---
# entity_id: test-optim-init
# entity_name: Optim Tests
# entity_type_id: module
# entity_path: tests/optim/__init__.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-28T15:00:00Z
# ---

"""Tests for splat_slam.optim."""
