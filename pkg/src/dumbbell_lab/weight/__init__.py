"""Axisymmetric bump weights."""

from dumbbell_lab.weight.model import Bump, PWeight, validate

__all__ = ["Bump", "PWeight", "validate"]
