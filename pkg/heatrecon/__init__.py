"""Reconstruction of the solution of a 1D parabolic equation from a distributed observation."""

__version__ = "0.1.0"
