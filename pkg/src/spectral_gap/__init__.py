"""Spectral gaps of Schroedinger operators on large boxes: Bessel kernel,
radial model problems, discretised box operators and numerical experiments."""

__version__ = "0.1.0"
