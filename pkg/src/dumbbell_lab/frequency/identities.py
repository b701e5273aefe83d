"""Pohozaev identities, closed-form frequency derivatives and coercivity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import DomainError, FitError
from dumbbell_lab.fem.fields import DiscreteField, FieldSample
from dumbbell_lab.fem.integrals import dn_sq, dz_sq, grad_sq, region_integrals, surface_integrals, u_dn, u_dz, u_sq
from dumbbell_lab.frequency.almgren import FrequencyProfile, Regime, regime_of, weighted_u_sq
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.regions import annulus_right, omega_corridor, omega_left
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)

Array = NDArray[np.float64]

LOCATIONS = ("left", "right", "corridor")


def _eps(u: DiscreteField) -> float:
    if u.mesh.kind != "dumbbell":
        raise DomainError(f"identities need a dumbbell mesh, got {u.mesh.kind!r}")
    return float(u.mesh.metadata["eps"])


def _p_terms(weight: PWeight, lam: float, N: int):
    def _radial(q: FieldSample) -> Array:
        return lam * (N * weight.eval_p(q.z, q.s) + weight.radial_term(q.z, q.s)) * q.u**2

    def _doubled(q: FieldSample) -> Array:
        return lam * (2.0 * weight.eval_p(q.z, q.s) + weight.radial_term(q.z, q.s)) * q.u**2

    def _axial(q: FieldSample) -> Array:
        return lam * weight.axial_term(q.z, q.s) * q.u**2

    return _radial, _doubled, _axial


@dataclass(frozen=True)
class IdentityResult:
    location: str
    value: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) / scale if scale > 0.0 else 0.0


def pohozaev_identity(
    u: DiscreteField,
    location: str,
    value: float,
    *,
    eigenvalue: float,
    weight: PWeight,
    quad_order: int = 48,
) -> IdentityResult:
    """
    Both sides of the Pohozaev identity at ``location``.

    left(t): t int_G (|grad u|^2 - lam p u^2) against
        2t int_G |du/dnu|^2 - (N-2) int_O |grad u|^2 + lam int_O (N p + x.grad p) u^2
        with G the half-sphere of radius t and O = D- outside B_t.
    right(t): t int_{G_t} |grad u|^2 against
        2 eps int_{G_2eps} (|grad u|^2 - 2|du/dnu|^2) + (N-2) int_{B_t \\ B_2eps} |grad u|^2 + 2t int_{G_t} |du/dnu|^2.
    corridor(r): int_{slice} (|grad u|^2 - lam p u^2) against
        2 int_{slice} |d1 u|^2 + int_{wall} |d1 u|^2 - lam int_O d1p u^2.
    """
    if location not in LOCATIONS:
        raise DomainError(f"unknown identity location {location!r}")
    mesh = u.mesh
    eps = _eps(u)
    N = mesh.dimension
    radial, _, axial = _p_terms(weight, eigenvalue, N)
    pu2 = weighted_u_sq(weight)
    if location == "left":
        t = float(value)
        regime_of(-t, eps)
        g = surface_integrals(u, curve(mesh, "half_sphere_left", t, quad_order), {"grad": grad_sq, "pu2": pu2, "dn": dn_sq})
        vol = region_integrals(u, omega_left(t), {"grad": grad_sq, "p": radial})
        lhs = t * (g["grad"] - eigenvalue * g["pu2"])
        rhs = 2.0 * t * g["dn"] - (N - 2) * vol["grad"] + vol["p"]
    elif location == "right":
        t = float(value)
        if not 2.0 * eps < t <= 3.0:
            raise DomainError(f"right identity needs 2 eps < t <= 3, got t={t}")
        outer = surface_integrals(u, curve(mesh, "half_sphere_right", t, quad_order), {"grad": grad_sq, "dn": dn_sq})
        inner = surface_integrals(u, curve(mesh, "half_sphere_right", 2.0 * eps, quad_order), {"grad": grad_sq, "dn": dn_sq})
        vol = region_integrals(u, annulus_right(2.0 * eps, t), {"grad": grad_sq})
        lhs = t * outer["grad"]
        rhs = 2.0 * eps * (inner["grad"] - 2.0 * inner["dn"]) + (N - 2) * vol["grad"] + 2.0 * t * outer["dn"]
    else:
        r = float(value)
        if not 0.0 < r <= 1.0:
            raise DomainError(f"corridor identity needs 0 < r <= 1, got r={r}")
        g = surface_integrals(u, curve(mesh, "slice", r, quad_order), {"grad": grad_sq, "pu2": pu2, "d1": dz_sq})
        wall = surface_integrals(u, curve(mesh, "wall_left", 0.0, 4), {"d1": dz_sq})
        vol = region_integrals(u, omega_corridor(r), {"p": axial})
        lhs = g["grad"] - eigenvalue * g["pu2"]
        rhs = 2.0 * g["d1"] + wall["d1"] - vol["p"]
    return IdentityResult(location=location, value=float(value), lhs=float(lhs), rhs=float(rhs))


def pohozaev_residual(u: DiscreteField, location: str, value: float, **kwargs) -> float:
    """|LHS - RHS| / max(|LHS|, |RHS|) of :func:`pohozaev_identity` (0 when both vanish)."""
    return pohozaev_identity(u, location, value, **kwargs).residual


def r_eps_plus(u: DiscreteField, quad_order: int = 48) -> float:
    """int_{G_2eps^+} (-(N-2) u du/dnu + 2 eps |grad u|^2 - 4 eps |du/dnu|^2)."""
    eps = _eps(u)
    N = u.mesh.dimension
    g = surface_integrals(
        u, curve(u.mesh, "half_sphere_right", 2.0 * eps, quad_order), {"udn": u_dn, "grad": grad_sq, "dn": dn_sq}
    )
    return float(-(N - 2) * g["udn"] + 2.0 * eps * g["grad"] - 4.0 * eps * g["dn"])


@dataclass(frozen=True)
class RemainderFit:
    exponent: float
    constant: float
    eps: tuple[float, ...]
    values: tuple[float, ...]


def fit_remainder(eps_values: list[float], remainders: list[float], N: int) -> RemainderFit:
    """
    Log-log slope of |R_eps^+| against eps and the smallest C_8 with |R_eps^+| <= C_8 eps^N.

    Raises:
        FitError: With fewer than two samples or a vanishing remainder.
    """
    e = np.asarray(eps_values, dtype=float)
    r = np.abs(np.asarray(remainders, dtype=float))
    if e.size < 2 or np.any(r <= 0.0):
        raise FitError("remainder fit needs at least two nonzero samples")
    slope = float(np.polyfit(np.log(e), np.log(r), 1)[0])
    return RemainderFit(
        exponent=slope,
        constant=float(np.max(r / e**N)),
        eps=tuple(e.tolist()),
        values=tuple(np.asarray(remainders, dtype=float).tolist()),
    )


def closed_form_derivative(
    u: DiscreteField,
    r: float,
    *,
    eigenvalue: float,
    weight: PWeight,
    quad_order: int = 48,
) -> float:
    """dN_eps/dr from the closed forms of the three regimes."""
    mesh = u.mesh
    eps = _eps(u)
    N = mesh.dimension
    _, doubled, axial = _p_terms(weight, eigenvalue, N)
    regime = regime_of(r, eps)
    traces = {"u2": u_sq, "dn": dn_sq, "udn": u_dn}
    if regime is Regime.LEFT:
        t = -r
        g = surface_integrals(u, curve(mesh, "half_sphere_left", t, quad_order), traces)
        vol = region_integrals(u, omega_left(t), {"p": doubled})
        dNdt = -2.0 * t * (g["dn"] * g["u2"] - g["udn"] ** 2) / g["u2"] ** 2 - vol["p"] / g["u2"]
        return float(-dNdt)
    if regime is Regime.CORRIDOR:
        g = surface_integrals(u, curve(mesh, "slice", r, quad_order), {"u2": u_sq, "d1": dz_sq, "ud1": u_dz})
        wall = surface_integrals(u, curve(mesh, "wall_left", 0.0, 4), {"d1": dz_sq})
        vol = region_integrals(u, omega_corridor(r), {"p": axial})
        schwarz = 2.0 * (g["d1"] * g["u2"] - g["ud1"] ** 2) / g["u2"] ** 2
        return float(eps * (schwarz + wall["d1"] / g["u2"]) - eps * vol["p"] / g["u2"])
    t = r - 1.0
    if not 2.0 * eps < t < 3.0:
        raise DomainError(f"right derivative formula needs 2 eps < t < 3, got t={t}")
    g = surface_integrals(u, curve(mesh, "half_sphere_right", t, quad_order), traces)
    return float(2.0 * t * (g["dn"] * g["u2"] - g["udn"] ** 2) / g["u2"] ** 2 + r_eps_plus(u, quad_order) / g["u2"])


@dataclass(frozen=True)
class DerivativeSample:
    r: float
    numeric: float
    closed: float

    @property
    def error(self) -> float:
        return abs(self.numeric - self.closed)


@dataclass(frozen=True)
class DerivativeReport:
    samples: tuple[DerivativeSample, ...]
    remainder: float | None

    @property
    def median_relative_error(self) -> float:
        if not self.samples:
            return float("nan")
        errors = np.array([x.error for x in self.samples])
        scale = np.median(np.abs([x.closed for x in self.samples]))
        return float(np.median(errors) / max(scale, 1e-300))


def derivative_residual(
    profile: FrequencyProfile,
    u: DiscreteField,
    *,
    eigenvalue: float,
    weight: PWeight,
    quad_order: int = 48,
) -> DerivativeReport:
    """
    Central differences of N(r) against the closed forms, per interior sample.

    Samples are grouped by regime; each group needs three or more points.
    """
    eps = _eps(u)
    out: list[DerivativeSample] = []
    for regime in (Regime.LEFT, Regime.CORRIDOR, Regime.RIGHT):
        group = sorted((x for x in profile.samples if x.regime is regime), key=lambda x: x.r)
        if len(group) < 3:
            continue
        r = np.array([x.r for x in group])
        numeric = np.gradient(np.array([x.N for x in group]), r)
        for i in range(1, len(group) - 1):
            if regime is Regime.RIGHT and not 2.0 * eps < r[i] - 1.0 < 3.0:
                continue
            closed = closed_form_derivative(u, float(r[i]), eigenvalue=eigenvalue, weight=weight, quad_order=quad_order)
            out.append(DerivativeSample(r=float(r[i]), numeric=float(numeric[i]), closed=closed))
    remainder = r_eps_plus(u, quad_order) if any(x.regime is Regime.RIGHT for x in profile.samples) else None
    report = DerivativeReport(samples=tuple(out), remainder=remainder)
    logger.info("derivative check: %d samples, median relative error %.3g", len(out), report.median_relative_error)
    return report


def coercivity_ratio(u: DiscreteField, r: float, *, eigenvalue: float, weight: PWeight) -> float:
    """int (|grad u|^2 - lam p u^2) over Omega_r divided by half the Dirichlet energy there."""
    eps = _eps(u)
    regime = regime_of(r, eps)
    if regime is Regime.RIGHT:
        raise DomainError(f"coercivity is checked left of the junction, got r={r}")
    region = omega_left(-r) if regime is Regime.LEFT else omega_corridor(r)
    vol = region_integrals(u, region, {"grad": grad_sq, "pu2": weighted_u_sq(weight)})
    return float((vol["grad"] - eigenvalue * vol["pu2"]) / (0.5 * vol["grad"]))
