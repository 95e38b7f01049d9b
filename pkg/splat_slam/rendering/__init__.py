"""Differentiable splat rasterization: projection, forward blending and backward pass."""
