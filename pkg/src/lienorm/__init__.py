"""Exact normal forms for nonlinear representations of Lie algebras by formal vector fields."""

__version__ = "0.1.0"
