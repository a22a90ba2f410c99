"""Exact evaluation of the Walsh-model trilinear form and its time-frequency Bellman bounds."""

__version__ = "0.1.0"
