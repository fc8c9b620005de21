"""Numerical laboratory for Fujita-type blow-up with inverse-square potentials."""

__version__ = "0.1.0"
