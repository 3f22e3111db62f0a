"""Permutation-group invariants, quadratic class groups and 3-torsion averages."""

__version__ = "0.1.0"
