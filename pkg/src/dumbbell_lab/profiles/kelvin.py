"""Kelvin transform about points of the x1-axis, and the dipole field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import gamma

from dumbbell_lab.errors import DomainError
from dumbbell_lab.fem.fields import AnalyticField
from dumbbell_lab.fem.integrals import grad_sq, point_integrals, surface_integral, u_sq
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.cross_section.angular import angular_profile
from dumbbell_lab.utils.quadrature import half_space_polar_rule

Array = NDArray[np.float64]


def kelvin(field: AnalyticField, center: float = 0.0, radius: float = 1.0) -> AnalyticField:
    """
    v~(x) = (R / r)^{N-2} v(c + R^2 d / r^2), d = x - c, r = |d|.

    Raises (on evaluation):
        DomainError: At the center.
    """
    N = field.dimension
    R2 = radius * radius

    def _split(z, s):
        dz = np.asarray(z, dtype=float) - center
        s = np.asarray(s, dtype=float)
        r2 = dz * dz + s * s
        if np.any(r2 <= 0.0):
            raise DomainError(f"Kelvin transform evaluated at its center x1={center}")
        factor = (R2 / r2) ** (0.5 * (N - 2))
        return dz, s, r2, factor, center + R2 * dz / r2, R2 * s / r2

    def _value(z, s):
        _, _, _, factor, yz, ys = _split(z, s)
        return factor * field.value(yz, ys)

    def _grad(z, s):
        dz, ds, r2, factor, yz, ys = _split(z, s)
        v = field.value(yz, ys)
        gz, gs = field.grad(yz, ys)
        # J = R^2 / r^2 (I - 2 d d^T / r^2), symmetric
        scale = R2 / r2
        proj = (dz * gz + ds * gs) / r2
        jz = scale * (gz - 2.0 * dz * proj)
        js = scale * (gs - 2.0 * ds * proj)
        radial = -(N - 2) * factor / r2
        return radial * dz * v + factor * jz, radial * ds * v + factor * js

    return AnalyticField(_value, _grad, N, f"kelvin({field.name})")


def dipole_field(N: int, beta: float = 1.0, center: float = 0.0) -> AnalyticField:
    """beta (x1 - c) / |x - c|^N."""

    def _value(z, s):
        dz = z - center
        return beta * dz / np.hypot(dz, s) ** N

    def _grad(z, s):
        dz = z - center
        r2 = dz * dz + s * s
        rn2 = r2 ** (0.5 * (N + 2))
        return beta * (r2 - N * dz * dz) / rn2, -beta * N * dz * s / rn2

    return AnalyticField(_value, _grad, N, "dipole")


@dataclass(frozen=True)
class KelvinIdentity:
    lhs: float
    rhs: float
    exact: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.lhs), abs(self.rhs))


def kelvin_energy_identity(N: int, n_rho: int = 64, n_angle: int = 64) -> KelvinIdentity:
    """
    int_{B_1^-} |grad v~|^2 + (N-2) int_{Gamma_1^-} v~^2 = int_{Omega_{-1}} |grad v|^2

    for v = x1 / |x|^N, whose transform is v~ = x1. The closed form of both
    sides is |B_1^-| + (N-2) Upsilon_N^2.
    """
    v = dipole_field(N)
    v_tilde = kelvin(v)
    z, s, w = half_space_polar_rule(N, 0.0, 1.0, side="left", n_rho=n_rho, n_angle=n_angle)
    inner = point_integrals(v_tilde, z, s, w, {"grad": grad_sq})["grad"]
    trace = surface_integral(v_tilde, curve(None, "half_sphere_left", 1.0, n_angle, N=N), u_sq)
    z, s, w = half_space_polar_rule(N, 1.0, None, side="left", n_rho=n_rho, n_angle=n_angle)
    outer = point_integrals(v, z, s, w, {"grad": grad_sq})["grad"]
    half_ball = float(np.pi ** (0.5 * N) / gamma(0.5 * N + 1.0) / 2.0)
    exact = half_ball + (N - 2) * angular_profile(N).upsilon ** 2
    return KelvinIdentity(lhs=inner + (N - 2) * trace, rhs=outer, exact=exact)
