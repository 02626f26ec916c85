"""Closed-loop carrier-landing simulation for an F/A-18-class aircraft."""

__version__ = "0.1.0"
