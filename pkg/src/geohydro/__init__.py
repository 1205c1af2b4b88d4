"""Geometric hydrodynamics on the circle: densities, the Madelung transform and their dynamics."""

__version__ = "0.1.0"
