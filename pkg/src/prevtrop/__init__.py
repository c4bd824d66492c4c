"""Tropicalization of toric prevarieties built from systems of fans."""

from prevtrop.extreal import INF, Infinity

__all__ = ["INF", "Infinity"]
__version__ = "0.1.0"
