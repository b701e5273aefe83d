"""Blow-up rescalings of the eigenfield near the two junctions."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import DomainError
from dumbbell_lab.fem.fields import DiscreteField, FieldSample, ScalarField
from dumbbell_lab.fem.integrals import surface_integral
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.models import MeridianMesh

Array = NDArray[np.float64]

DEFAULT_K_TILDE = 0.25


class RescaleKind(str, Enum):
    RIGHT_TILDE = "right_tilde"
    LEFT_HAT = "left_hat"
    U_NORMALIZED = "U_normalized"
    U_LAMBDA = "U_lambda"


@dataclass(frozen=True)
class RescaledField:
    """
    x -> base(c + a (x - c)) / norm, with c on the x1-axis.

    ``center`` is c, ``factor`` is a, ``norm`` the normalization constant.
    """

    kind: RescaleKind
    base: ScalarField
    center: float
    factor: float
    norm: float
    lam: float | None = None

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def name(self) -> str:
        return self.kind.value if self.lam is None else f"{self.kind.value}({self.lam:g})"

    @property
    def tail_resolved(self) -> bool:
        return bool(getattr(self.base, "tail_resolved", False))

    @property
    def mesh(self) -> MeridianMesh | None:
        """The base mesh when the rescaling is the identity frame, else None."""
        if self.center == 0.0 and self.factor == 1.0:
            return getattr(self.base, "mesh", None)
        return None

    def to_base(self, z: Array, s: Array) -> tuple[Array, Array]:
        z = np.asarray(z, dtype=float)
        s = np.asarray(s, dtype=float)
        return self.center + self.factor * (z - self.center), self.factor * s

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered") -> FieldSample:
        z = np.ravel(np.asarray(z, dtype=float))
        s = np.ravel(np.asarray(s, dtype=float))
        bz, bs = self.to_base(z, s)
        q = self.base.evaluate(bz, bs, gradient=gradient)
        g = self.factor / self.norm
        return FieldSample(z, s, q.u / self.norm, g * q.gz, g * q.gs)

    def __call__(self, z: Array, s: Array) -> Array:
        return self.evaluate(z, s).u


def _positive_sqrt(value: float, what: str) -> float:
    if not np.isfinite(value) or value <= 0.0:
        raise DomainError(f"vanishing normalization integral for {what}: {value:.3e}")
    return float(np.sqrt(value))


def _dumbbell_eps(u: DiscreteField) -> float:
    if u.mesh.kind != "dumbbell":
        raise DomainError(f"rescalings need a dumbbell field, got {u.mesh.kind!r}")
    return float(u.mesh.metadata["eps"])


def right_tilde(u: DiscreteField) -> RescaledField:
    """u~(x) = u(e1 + eps (x - e1)) / eps."""
    eps = _dumbbell_eps(u)
    return RescaledField(RescaleKind.RIGHT_TILDE, u, center=1.0, factor=eps, norm=eps)


def left_hat(u: DiscreteField, quad_order: int = 48) -> RescaledField:
    """u^(x) = u(eps x) / c with c^2 = eps^{1-N} int_{x1 = eps} u^2, so the hat trace on x1 = 1 is 1."""
    eps = _dumbbell_eps(u)
    N = u.dimension
    trace = surface_integral(u, curve(u.mesh, "slice", eps, quad_order))
    norm = _positive_sqrt(eps ** (1 - N) * trace, "left_hat")
    return RescaledField(RescaleKind.LEFT_HAT, u, center=0.0, factor=eps, norm=norm)


def u_normalized(u: DiscreteField, k_tilde: float = DEFAULT_K_TILDE, quad_order: int = 48) -> RescaledField:
    """U = u / sqrt(int_{Gamma_k~^-} u^2)."""
    eps = _dumbbell_eps(u)
    if not eps <= k_tilde < 1.0:
        raise DomainError(f"k_tilde={k_tilde} must lie in [eps, 1)")
    trace = surface_integral(u, curve(u.mesh, "half_sphere_left", k_tilde, quad_order))
    return RescaledField(RescaleKind.U_NORMALIZED, u, center=0.0, factor=1.0, norm=_positive_sqrt(trace, "U"), lam=None)


def u_lambda(U: ScalarField, lam: float, quad_order: int = 48) -> RescaledField:
    """U^lam(x) = U(lam x) / sqrt(H_U(lam)); its trace on Gamma_1^- is 1."""
    if lam <= 0.0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    N = U.dimension
    trace = surface_integral(U, curve(None, "half_sphere_left", lam, quad_order, N=N))
    norm = _positive_sqrt(lam ** (1 - N) * trace, f"U_lambda({lam:g})")
    return RescaledField(RescaleKind.U_LAMBDA, U, center=0.0, factor=lam, norm=norm, lam=lam)


def rescale(u: DiscreteField, kind: str | RescaleKind, **kwargs) -> RescaledField:
    """Dispatch on ``kind``; ``U_lambda`` expects ``lam`` and rescales U_normalized."""
    kind = RescaleKind(kind)
    if kind is RescaleKind.RIGHT_TILDE:
        return right_tilde(u)
    if kind is RescaleKind.LEFT_HAT:
        return left_hat(u, **kwargs)
    if kind is RescaleKind.U_NORMALIZED:
        return u_normalized(u, **kwargs)
    lam = kwargs.pop("lam")
    return u_lambda(u_normalized(u, **kwargs), lam)
