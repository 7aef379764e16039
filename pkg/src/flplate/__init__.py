"""Unified-transform solvers for the linearised fluid-loaded plate."""

__version__ = "0.1.0"
