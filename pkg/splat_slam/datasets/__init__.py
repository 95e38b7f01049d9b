"""Sequence sources: TUM RGB-D directories, synthetic scenes and trajectory files."""
