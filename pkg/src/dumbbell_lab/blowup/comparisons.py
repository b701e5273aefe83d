"""Blow-up limits against the junction profiles, nodal sign scans and the hat growth bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.cross_section.radial import CrossSectionSpectrum
from dumbbell_lab.errors import DomainError
from dumbbell_lab.fem.fields import DiscreteField, ScalarField
from dumbbell_lab.fem.integrals import surface_integral
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.blowup.rescale import left_hat
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor, gauss_legendre, half_space_polar_rule

logger = get_logger(__name__)

Array = NDArray[np.float64]


@dataclass(frozen=True)
class ProfileComparison:
    constant: float
    residual: float
    n_points: int


def comparison_rule(
    N: int,
    junction: float,
    *,
    slab_length: float = 2.0,
    annulus: tuple[float, float] = (1.0, 3.0),
    n: int = 24,
) -> tuple[Array, Array, Array]:
    """
    Tube slab of length ``slab_length`` next to the junction plus the half-annulus
    on the open side. ``junction = 1`` puts the tube at x1 < 1 (right blow-up
    frame), ``junction = 0`` at x1 > 0 (left blow-up frame).
    """
    if junction == 1.0:
        zt, wz = gauss_legendre(1.0 - slab_length, 1.0, n)
        side = "right"
    elif junction == 0.0:
        zt, wz = gauss_legendre(0.0, slab_length, n)
        side = "left"
    else:
        raise DomainError(f"junction must be 0 or 1, got {junction}")
    st, ws = gauss_legendre(0.0, 1.0, n)
    Z, S = np.meshgrid(zt, st, indexing="ij")
    W = axisymmetric_factor(N) * np.outer(wz, ws) * S ** (N - 2)
    az, as_, aw = half_space_polar_rule(N, annulus[0], annulus[1], side=side, n_rho=n, n_angle=n)
    return (
        np.concatenate([Z.ravel(), az + junction]),
        np.concatenate([S.ravel(), as_]),
        np.concatenate([W.ravel(), aw]),
    )


def compare_blowup_to_profile(
    rescaled: ScalarField,
    profile: ScalarField,
    *,
    junction: float = 1.0,
    slab_length: float = 2.0,
    annulus: tuple[float, float] = (1.0, 3.0),
    n: int = 24,
) -> ProfileComparison:
    """
    Weighted least-squares constant c with rescaled ~ c profile and the relative
    L^2 residual ||rescaled - c profile|| / ||c profile|| on the comparison rule.

    Raises:
        DomainError: If the profile vanishes on the comparison region.
    """
    z, s, w = comparison_rule(rescaled.dimension, junction, slab_length=slab_length, annulus=annulus, n=n)
    a = rescaled.evaluate(z, s).u
    b = profile.evaluate(z, s).u
    keep = np.isfinite(a) & np.isfinite(b)
    a, b, w = a[keep], b[keep], w[keep]
    bb = float(np.sum(w * b * b))
    if bb <= 0.0:
        raise DomainError(f"profile {getattr(profile, 'name', '?')!r} vanishes on the comparison region")
    c = float(np.sum(w * a * b) / bb)
    if c == 0.0:
        return ProfileComparison(constant=0.0, residual=float("inf"), n_points=int(a.size))
    residual = float(np.sqrt(np.sum(w * (a - c * b) ** 2) / (c * c * bb)))
    return ProfileComparison(constant=c, residual=residual, n_points=int(a.size))


@dataclass(frozen=True)
class SignSample:
    side: str
    radius: float
    minimum: float

    @property
    def positive(self) -> bool:
        return self.minimum > 0.0


def nodal_sign_scan(
    u: DiscreteField,
    radii: Sequence[float],
    *,
    side: str = "left",
    quad_order: int = 64,
) -> list[SignSample]:
    """Minimum of u over each half-sphere Gamma_r^- (``side='left'``) or Gamma_t^+ (``'right'``)."""
    kind = {"left": "half_sphere_left", "right": "half_sphere_right"}.get(side)
    if kind is None:
        raise DomainError(f"unknown side {side!r}")
    out = []
    for r in radii:
        c = curve(u.mesh, kind, float(r), quad_order)
        values = u.evaluate(c.z, c.s).u
        out.append(SignSample(side=side, radius=float(r), minimum=float(np.min(values))))
    return out


@dataclass(frozen=True)
class GrowthSample:
    R: float
    trace: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.trace <= self.bound


def hat_growth_bound(
    u: DiscreteField,
    cross: CrossSectionSpectrum,
    radii: Sequence[float] = (2.0, 3.0, 4.0),
    quad_order: int = 48,
) -> list[GrowthSample]:
    """int_{x1 = R} u^2 for the left-hat rescaling against exp(4 sqrt(lambda_1) (R - 1))."""
    hat = left_hat(u, quad_order)
    eps = float(u.mesh.metadata["eps"])
    out = []
    for R in radii:
        if R * eps > 1.0:
            raise DomainError(f"slice R={R} leaves the channel at eps={eps}")
        trace = surface_integral(hat, curve(None, "slice", float(R), quad_order, N=u.dimension, eps=1.0))
        out.append(GrowthSample(R=float(R), trace=trace, bound=float(np.exp(4.0 * cross.sqrt_lambda1 * (R - 1.0)))))
    return out
