"""Super- and sub-solution envelopes built from the junction profiles."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.profiles.junction import ProfilePair
from dumbbell_lab.utils.logging import get_logger

logger = get_logger(__name__)

Array = NDArray[np.float64]


def _blow(z: Array, s: Array, scale: float) -> tuple[Array, Array]:
    """e1 + (x - e1) / scale in meridian coordinates."""
    return 1.0 + (z - 1.0) / scale, s / scale


def upper_envelope(pair: ProfilePair, eps: float, z: Array, s: Array) -> Array:
    """eps Phi_1(e1 + (x - e1)/eps) + 2 gamma eps Phi_2(e1 + (x - e1)/(2 eps))."""
    k = pair.cross.sqrt_lambda1
    log_gamma = -np.log(2.0 * eps) - k / (4.0 * eps)
    z1, s1 = _blow(z, s, eps)
    z2, s2 = _blow(z, s, 2.0 * eps)
    return eps * pair.phi1(z1, s1) + 2.0 * eps * np.exp(log_gamma) * pair.phi2(z2, s2)


def lower_envelope(pair: ProfilePair, eps: float, z: Array, s: Array) -> Array:
    """eps Phi_1(e1 + (x - e1)/eps) - sqrt(2) gamma~ eps Phi_2(e1 + (x - e1)/(sqrt(2) eps))."""
    k = pair.cross.sqrt_lambda1
    root2 = np.sqrt(2.0)
    log_gamma = -np.log(root2 * eps) - k / (2.0 * root2 * eps)
    z1, s1 = _blow(z, s, eps)
    z2, s2 = _blow(z, s, root2 * eps)
    return eps * pair.phi1(z1, s1) - root2 * eps * np.exp(log_gamma) * pair.phi2(z2, s2)


@dataclass(frozen=True)
class EnvelopeReport:
    eps: float
    c3: float
    c5: float
    usot_constant: float
    sup_abs: float
    n_points: int
    upper_violations: int

    @property
    def usot_holds(self) -> bool:
        return self.usot_constant > 0.0 and self.usot_constant >= 0.5 * self.c5

    def as_dict(self) -> dict:
        return {**asdict(self), "usot_holds": self.usot_holds}


def check_envelopes(field: DiscreteField, pair: ProfilePair, eps: float, *, r0: float = 0.5) -> EnvelopeReport:
    """
    Fit the envelope constants on the vertices of B_eps = B+_{r0} u {1/2 < x1 <= 1}.

    C3 is the smallest constant with |u| <= C3 Phi^eps, C5 the largest with
    u >= C5 Phi~ where Phi~ > 0, and the lower-bound constant is
    min u / (x1 - 1) on B+_{r0} minus B+_{2 eps}.

    Raises:
        ConfigurationError: If the field's mesh is not a dumbbell of radius ``eps``.
    """
    mesh = field.mesh
    if mesh.kind != "dumbbell" or abs(float(mesh.metadata["eps"]) - eps) > 1e-12:
        raise ConfigurationError(f"envelope eps={eps} does not match the field's mesh")
    z, s = mesh.z, mesh.s
    rho = np.hypot(z - 1.0, s)
    right = z > 1.0 + 1e-12
    sample = ~mesh.dirichlet_mask & ((right & (rho < r0)) | ((z > 0.5) & (z <= 1.0 + 1e-12)))
    idx = np.flatnonzero(sample)
    u = field.values[idx]
    upper = upper_envelope(pair, eps, z[idx], s[idx])
    lower = lower_envelope(pair, eps, z[idx], s[idx])

    pos = upper > 0.0
    c3 = float(np.max(np.abs(u[pos]) / upper[pos]))
    violations = int(np.sum(~pos & (np.abs(u) > 0.0)))
    sub = lower > 0.0
    c5 = float(np.min(u[sub] / lower[sub])) if sub.any() else float("nan")

    ring = right & (rho < r0) & (rho > 2.0 * eps) & ~mesh.dirichlet_mask
    usot = float(np.min(field.values[ring] / (z[ring] - 1.0))) if ring.any() else float("nan")
    report = EnvelopeReport(
        eps=eps,
        c3=c3,
        c5=c5,
        usot_constant=usot,
        sup_abs=field.max_abs(),
        n_points=int(idx.size),
        upper_violations=violations,
    )
    logger.info("envelopes eps=%.4g: C3=%.4g C5=%.4g lower=%.4g", eps, c3, c5, usot)
    return report
