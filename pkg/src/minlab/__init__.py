"""Numerical certificates for minimal submanifolds of spheres and minimal matrix cones."""

__version__ = "0.1.0"
