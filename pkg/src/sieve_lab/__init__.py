"""Numerical toolkit for multidimensional Selberg sieve functionals."""

__version__ = "0.1.0"
