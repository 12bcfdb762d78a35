"""Generalized impedance boundary conditions for highly conducting obstacles."""
__version__ = "0.1.0"
