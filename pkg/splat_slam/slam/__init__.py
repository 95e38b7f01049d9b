"""Tracking, keyframe management, mapping and the pipeline driver."""
