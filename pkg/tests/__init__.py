# ---
# entity_id: test-package
# entity_name: Test Package
# entity_type_id: module
# entity_path: tests/__init__.py
# entity_language: python
# entity_state: active
# entity_created: 2026-01-22T16:00:00Z
# entity_exports: []
# entity_dependencies: []
# ---

"""
Splat SLAM Test Package.

Contains unit and integration tests for:
- SE(3) geometry and projection
- Gaussian map storage, insertion, pruning and PLY files
- Rasterizer forward and backward passes
- Losses and optimisers
- Tracking, keyframing, mapping and the pipeline
- Datasets, evaluation and the CLI
"""
