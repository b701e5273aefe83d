"""Numerical lab for eigenfunction singularities on dumbbell domains."""

__version__ = "0.3.0"
