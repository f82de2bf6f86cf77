"""Statkit: surfaces in statistical manifolds and their curvature inequalities."""

__version__ = "0.1.0"
