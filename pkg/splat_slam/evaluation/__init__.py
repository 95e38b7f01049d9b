"""Trajectory and rendering metrics, the convergence funnel and report writers."""
