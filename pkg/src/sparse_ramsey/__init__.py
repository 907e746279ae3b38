"""Density oracles, sparse regularity and monochromatic embedding in random graphs."""

__version__ = "0.1.0"
