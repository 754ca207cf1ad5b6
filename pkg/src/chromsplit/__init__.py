"""Exact workbench for height-2 chromatic splitting computations at the prime 2."""

__version__ = "0.1.0"
