"""Exact computations with vector bundles on chains of rational curves."""

__version__ = "0.1.0"
