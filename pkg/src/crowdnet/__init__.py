"""Crowd motion through constrained corridors with diffusion-adaptive agents."""

__version__ = "0.1.0"
