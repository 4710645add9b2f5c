"""Stabilizer codes on colexes and toric lattices, with thermal and gate tools."""

__version__ = "0.1.0"
