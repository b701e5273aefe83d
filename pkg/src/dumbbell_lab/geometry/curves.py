"""Sampling curves: the half-spheres and channel slices of the frequency functions."""

from __future__ import annotations

import numpy as np

from dumbbell_lab.errors import DomainError
from dumbbell_lab.geometry.models import MeridianMesh, SamplingCurve
from dumbbell_lab.utils.quadrature import axisymmetric_factor, composite_gauss, gauss_legendre

CURVE_KINDS = ("half_sphere_left", "slice", "half_sphere_right", "wall_left")


def _channel_radius(mesh: MeridianMesh | None, eps: float | None) -> float:
    if eps is not None:
        return float(eps)
    if mesh is None:
        return 1.0
    if mesh.kind == "dumbbell":
        return float(mesh.metadata["eps"])
    return float(mesh.metadata.get("radius", 1.0)) if mesh.kind == "cylinder" else 1.0


def _check_range(mesh: MeridianMesh | None, kind: str, value: float, radius: float) -> None:
    if kind in ("half_sphere_left", "half_sphere_right") and value <= 0.0:
        raise DomainError(f"{kind} radius must be positive, got {value}")
    if mesh is None:
        return
    meta = mesh.metadata
    if mesh.kind == "dumbbell":
        if kind == "half_sphere_left" and not radius <= value <= meta["R_left"]:
            raise DomainError(f"half_sphere_left({value}) outside [{radius}, {meta['R_left']}]")
        if kind == "half_sphere_right" and value > meta["R_right"]:
            raise DomainError(f"half_sphere_right({value}) beyond R_right={meta['R_right']}")
        if kind == "slice" and not 0.0 <= value <= 1.0:
            raise DomainError(f"slice({value}) outside the channel [0, 1]")
    elif mesh.kind == "model":
        if kind == "slice" and not -meta["tube_length"] <= value <= 1.0:
            raise DomainError(f"slice({value}) outside the model tube")
        if kind == "half_sphere_right" and value > meta["radius"]:
            raise DomainError(f"half_sphere_right({value}) beyond R={meta['radius']}")
    elif mesh.kind == "cylinder":
        if kind == "slice" and not meta["z_start"] <= value <= meta["z_end"]:
            raise DomainError(f"slice({value}) outside the cylinder")
    elif mesh.kind == "exterior":
        if kind == "half_sphere_left" and not 1.0 <= value <= meta["radius"]:
            raise DomainError(f"half_sphere_left({value}) outside the exterior mesh")


def curve(
    mesh: MeridianMesh | None,
    kind: str,
    value: float,
    quad_order: int = 48,
    *,
    N: int | None = None,
    eps: float | None = None,
) -> SamplingCurve:
    """
    Build the quadrature of a sampling curve.

    ``half_sphere_left(t)``: |x| = t, x1 < 0. ``slice(r)``: x1 = r inside the
    channel (radius eps, or 1 on model and cylinder meshes).
    ``half_sphere_right(t)``: |x - e1| = t, x1 > 1. ``wall_left``: the plane wall
    {x1 = 0, |x'| >= eps} of D-, integrated piecewise between wall vertices.

    Args:
        mesh: Mesh the curve must lie in (None for analytic use).
        kind: One of CURVE_KINDS.
        value: Radius t or abscissa r.
        quad_order: Gauss points (per wall segment for ``wall_left``).
        N: Dimension when no mesh is given.
        eps: Channel radius override.

    Raises:
        DomainError: If the curve leaves the meshed region.
    """
    if kind not in CURVE_KINDS:
        raise DomainError(f"unknown curve kind {kind!r}")
    dim = mesh.dimension if mesh is not None else N
    if dim is None:
        raise DomainError("dimension required for a curve without mesh")
    radius = _channel_radius(mesh, eps)
    _check_range(mesh, kind, float(value), radius)
    omega = axisymmetric_factor(dim)

    if kind in ("half_sphere_left", "half_sphere_right"):
        t = float(value)
        if kind == "half_sphere_left":
            alpha, w = gauss_legendre(0.5 * np.pi, np.pi, quad_order)
            center = 0.0
        else:
            alpha, w = gauss_legendre(0.0, 0.5 * np.pi, quad_order)
            center = 1.0
        normals = np.column_stack([np.cos(alpha), np.sin(alpha)])
        points = np.column_stack([center + t * normals[:, 0], t * normals[:, 1]])
        weights = omega * w * t * (t * normals[:, 1]) ** (dim - 2)
        return SamplingCurve(kind=kind, value=t, points=points, normals=normals, weights=weights)

    if kind == "slice":
        s, w = gauss_legendre(0.0, radius, quad_order)
        points = np.column_stack([np.full_like(s, float(value)), s])
        normals = np.tile([1.0, 0.0], (s.shape[0], 1))
        return SamplingCurve(kind=kind, value=float(value), points=points, normals=normals, weights=omega * w * s ** (dim - 2))

    if mesh is None or mesh.kind != "dumbbell":
        raise DomainError("wall_left needs a dumbbell mesh")
    z, s_all = mesh.z, mesh.s
    on_wall = (np.abs(z) < 1e-9) & (s_all >= radius - 1e-9)
    breaks = np.unique(s_all[on_wall])
    s, w = composite_gauss(breaks, quad_order)
    points = np.column_stack([np.zeros_like(s), s])
    normals = np.tile([1.0, 0.0], (s.shape[0], 1))
    return SamplingCurve(
        kind=kind,
        value=radius,
        points=points,
        normals=normals,
        weights=omega * w * s ** (dim - 2),
        gradient_mode="element",
    )
