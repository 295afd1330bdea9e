"""Verification toolkit for third-order superintegrable systems separating in polar coordinates."""

__version__ = "0.1.0"
