"""Spin squeezing dynamics of the transverse-field XY chain after a field quench."""

__version__ = "0.1.0"
