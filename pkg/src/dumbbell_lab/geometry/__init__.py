"""Meridian meshes of the dumbbell, model, exterior and cylinder domains."""

from dumbbell_lab.geometry.builder import (
    build_cylinder_mesh,
    build_exterior_mesh,
    build_mesh,
    build_model_mesh,
)
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.models import DumbbellSpec, MeridianMesh, RegionDescriptor, SamplingCurve

__all__ = [
    "DumbbellSpec",
    "MeridianMesh",
    "RegionDescriptor",
    "SamplingCurve",
    "build_cylinder_mesh",
    "build_exterior_mesh",
    "build_mesh",
    "build_model_mesh",
    "curve",
]
