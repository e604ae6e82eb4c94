"""Spherical quandles, knot colorings and fixed-trace SU(2) representations."""

__version__ = "0.1.0"
