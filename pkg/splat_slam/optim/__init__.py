"""Losses and the Adam optimizer used by tracking and mapping."""
