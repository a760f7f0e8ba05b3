"""Fractional-order circuit simulation and structural identifiability."""

__version__ = "1.0.0"
