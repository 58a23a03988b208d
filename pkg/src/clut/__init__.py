"""Behavioral simulator for a clockless spin-based fracturable 6-input LUT."""

__version__ = "0.1.0"
