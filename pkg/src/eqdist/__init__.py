"""Zeros of random polynomials and their equilibrium limits."""

__version__ = "0.1.0"
