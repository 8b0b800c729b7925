"""Symmetrization, rearrangement and p-Laplace experiments on the discrete sphere."""

__version__ = "0.1.0"
