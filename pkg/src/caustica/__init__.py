"""Numerical spectral-projector sup-norm experiments on the disk and on surfaces of revolution."""

__version__ = "0.1.0"
