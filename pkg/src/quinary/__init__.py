"""Algebraic modular forms on genera of positive-definite quinary lattices."""

__version__ = "0.1.0"
