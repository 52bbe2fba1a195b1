"""Numerical verification toolkit for the critical-point exclusion region of
second Neumann eigenfunctions on convex planar domains."""

__version__ = "0.1.0"

from .bessel import SpectralConstants, find_constants

__all__ = ["SpectralConstants", "find_constants", "__version__"]
