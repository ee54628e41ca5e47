"""Numerical laboratory for GMRES on combined-field Helmholtz BIEs under trapping."""

__version__ = "0.1.0"
