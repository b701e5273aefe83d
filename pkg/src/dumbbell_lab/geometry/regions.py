"""Region descriptors for the volume integrals of the frequency functions."""

from __future__ import annotations

import numpy as np

from dumbbell_lab.geometry.models import RegionDescriptor


def omega_left(t: float) -> RegionDescriptor:
    """D- minus the half-ball B_t^-: the left-regime region for r = -t."""
    return RegionDescriptor(f"omega_left({t:g})", lambda z, s: z * z + s * s > t * t, ("left",))


def omega_corridor(r: float) -> RegionDescriptor:
    """D- together with the channel part {x1 < r}."""
    return RegionDescriptor(f"omega_corridor({r:g})", lambda z, s: z < r, ("left", "corridor"))


def omega_right(t: float) -> RegionDescriptor:
    """D- together with the channel and B_t^+."""
    return RegionDescriptor(
        f"omega_right({t:g})",
        lambda z, s: (z <= 1.0) | ((z - 1.0) ** 2 + s * s < t * t),
        ("left", "corridor", "right"),
    )


def half_ball_left(t: float) -> RegionDescriptor:
    return RegionDescriptor(f"half_ball_left({t:g})", lambda z, s: z * z + s * s < t * t, ("left",))


def ball_right(t: float) -> RegionDescriptor:
    return RegionDescriptor(f"ball_right({t:g})", lambda z, s: (z - 1.0) ** 2 + s * s < t * t, ("right",))


def annulus_right(t_inner: float, t_outer: float) -> RegionDescriptor:
    """B_{t_outer}^+ minus B_{t_inner}^+."""

    def _inside(z, s):
        r2 = (z - 1.0) ** 2 + s * s
        return (r2 > t_inner * t_inner) & (r2 < t_outer * t_outer)

    return RegionDescriptor(f"annulus_right({t_inner:g},{t_outer:g})", _inside, ("right",))


def tube_below(r: float, regions: tuple[str, ...] = ("tube",)) -> RegionDescriptor:
    """Tube part {x1 < r} (model or cylinder meshes)."""
    return RegionDescriptor(f"tube_below({r:g})", lambda z, s: z < r, regions)


def exterior_left(t: float) -> RegionDescriptor:
    """{|x| > t, x1 < 0} with no mesh-region filter (exterior meshes, reflected frames)."""
    return RegionDescriptor(f"exterior_left({t:g})", lambda z, s: (z < 0.0) & (z * z + s * s > t * t))


def everywhere(regions: tuple[str, ...] | None = None) -> RegionDescriptor:
    return RegionDescriptor("everywhere", lambda z, s: np.ones_like(z, dtype=bool), regions)
