"""Exact Legendre quartic tables, small-divisor certificates and symplectic
simulation for a two-mode string model."""

__version__ = "0.1.0"
