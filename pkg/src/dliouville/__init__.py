"""Discrete Liouville equation, Volkov solutions, annulus flip dynamics and
the non-compact quantum dilogarithm."""

__version__ = "0.1.0"
