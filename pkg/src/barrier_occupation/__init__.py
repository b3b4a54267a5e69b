"""Brownian motion allowed at most one time unit below a barrier:
explicit laws, exact samplers and a desk-scale validation suite."""

__version__ = "0.1.0"
