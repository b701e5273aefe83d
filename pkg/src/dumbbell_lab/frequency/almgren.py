"""
Almgren-type frequency quotients.

Three regimes on the dumbbell (left half-spheres about 0, channel slices,
right half-spheres about e1) plus the two model quotients for harmonic fields
in a tube and in an exterior half-space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import DomainError
from dumbbell_lab.fem.fields import DiscreteField, FieldSample, ScalarField
from dumbbell_lab.fem.integrals import (
    Frame,
    grad_sq,
    point_integrals,
    region_integrals,
    surface_integral,
    u_sq,
)
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.geometry.regions import exterior_left, omega_corridor, omega_left, omega_right, tube_below
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import half_space_polar_rule
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)

Array = NDArray[np.float64]

UNRESOLVED_DROP_RATIO = 1e-14


class Regime(str, Enum):
    LEFT = "left"
    CORRIDOR = "corridor"
    RIGHT = "right"
    TUBE_MODEL = "tube_model"
    EXTERIOR_MODEL = "exterior_model"


@dataclass(frozen=True)
class FrequencySample:
    regime: Regime
    r: float
    D: float
    H: float
    N: float


@dataclass
class FrequencyProfile:
    """Frequency samples of one field; ``dropped`` lists r values removed by the drop rule."""

    regime: str
    samples: list[FrequencySample]
    eps: float | None = None
    field_name: str = "u"
    dropped: list[float] = field(default_factory=list)

    @property
    def r(self) -> Array:
        return np.array([x.r for x in self.samples])

    @property
    def D(self) -> Array:
        return np.array([x.D for x in self.samples])

    @property
    def H(self) -> Array:
        return np.array([x.H for x in self.samples])

    @property
    def N(self) -> Array:
        return np.array([x.N for x in self.samples])

    def at(self, r: float) -> FrequencySample:
        for sample in self.samples:
            if abs(sample.r - r) < 1e-12:
                return sample
        raise KeyError(f"no frequency sample at r={r}")

    def rows(self) -> list[dict]:
        """CSV rows with columns regime, eps, r, D, H, N."""
        eps = "" if self.eps is None else self.eps
        return [
            {"regime": x.regime.value, "eps": eps, "r": x.r, "D": x.D, "H": x.H, "N": x.N} for x in self.samples
        ]


def weighted_u_sq(weight: PWeight):
    def _integrand(q: FieldSample) -> Array:
        return weight.eval_p(q.z, q.s) * q.u**2

    return _integrand


def regime_of(r: float, eps: float) -> Regime:
    """
    Raises:
        DomainError: For r in the excluded bands (-eps, 0) and (1, 1 + eps).
    """
    if r <= -eps:
        return Regime.LEFT
    if 0.0 <= r <= 1.0:
        return Regime.CORRIDOR
    if r >= 1.0 + eps:
        return Regime.RIGHT
    raise DomainError(f"r={r} lies in an excluded band for eps={eps}")


def apply_drop_rule(samples: list[FrequencySample], tail_resolved: bool) -> tuple[list[FrequencySample], list[float]]:
    """
    Remove samples whose H is not trustworthy.

    Unresolved fields lose samples with H below 1e-14 of the profile maximum;
    tail-resolved fields only lose nonpositive or non-finite H.
    """
    if not samples:
        return samples, []
    H = np.array([x.H for x in samples])
    finite = np.isfinite(H) & np.isfinite([x.N for x in samples])
    keep = finite & (H > 0.0)
    if not tail_resolved and keep.any():
        keep &= H >= UNRESOLVED_DROP_RATIO * float(np.max(H[keep]))
    dropped = [x.r for x, k in zip(samples, keep) if not k]
    if dropped:
        logger.warning("dropped %d frequency sample(s) at r=%s", len(dropped), dropped)
    return [x for x, k in zip(samples, keep) if k], dropped


def _dumbbell_sample(
    u: DiscreteField,
    r: float,
    eps: float,
    eigenvalue: float,
    weight: PWeight,
    quad_order: int,
) -> FrequencySample:
    mesh = u.mesh
    N = mesh.dimension
    regime = regime_of(r, eps)
    integrands = {"grad": grad_sq, "pu2": weighted_u_sq(weight)}
    if regime is Regime.LEFT:
        t = -r
        vol = region_integrals(u, omega_left(t), integrands)
        D_raw = vol["grad"] - eigenvalue * vol["pu2"]
        H_raw = surface_integral(u, curve(mesh, "half_sphere_left", t, quad_order))
        N_value = t * D_raw / H_raw if H_raw != 0.0 else np.nan
        return FrequencySample(regime, r, D_raw / t ** (N - 2), H_raw / t ** (N - 1), N_value)
    if regime is Regime.CORRIDOR:
        vol = region_integrals(u, omega_corridor(r), integrands)
        D = vol["grad"] - eigenvalue * vol["pu2"]
        H = surface_integral(u, curve(mesh, "slice", r, quad_order))
        return FrequencySample(regime, r, D, H, eps * D / H if H != 0.0 else np.nan)
    t = r - 1.0
    vol = region_integrals(u, omega_right(t), integrands)
    D = (vol["grad"] - eigenvalue * vol["pu2"]) / t ** (N - 2)
    H = surface_integral(u, curve(mesh, "half_sphere_right", t, quad_order)) / t ** (N - 1)
    return FrequencySample(regime, r, D, H, D / H if H != 0.0 else np.nan)


def frequency_dumbbell(
    u: DiscreteField,
    r_samples: Iterable[float],
    *,
    eigenvalue: float,
    weight: PWeight,
    quad_order: int = 48,
) -> FrequencyProfile:
    """
    N_eps(r) of an eigenfield on the eps-dumbbell at each sample.

    Left (r <= -eps, t = -r): N = t D_raw / H_raw with D_raw over D- outside
    B_t and H_raw over the half-sphere of radius t; D and H are reported with
    the t^{2-N}, t^{1-N} scalings. Corridor (0 <= r <= 1): N = eps D / H over
    the slice. Right (r >= 1 + eps, t = r - 1): N = D / H over half-spheres
    about e1.

    Raises:
        DomainError: If a sample lies in an excluded band or leaves the mesh.
    """
    mesh = u.mesh
    if mesh.kind != "dumbbell":
        raise DomainError(f"dumbbell frequency needs a dumbbell mesh, got {mesh.kind!r}")
    eps = float(mesh.metadata["eps"])
    samples = [_dumbbell_sample(u, float(r), eps, eigenvalue, weight, quad_order) for r in r_samples]
    kept, dropped = apply_drop_rule(samples, u.tail_resolved)
    regimes = {x.regime.value for x in kept}
    regime = regimes.pop() if len(regimes) == 1 else "dumbbell"
    return FrequencyProfile(regime=regime, samples=kept, eps=eps, field_name=u.name, dropped=dropped)


def frequency_tube_model(
    phi: ScalarField,
    r_samples: Iterable[float],
    *,
    mesh: MeridianMesh | None = None,
    quad_order: int = 48,
) -> FrequencyProfile:
    """
    N(r) = int_{tube, x1 < r} |grad phi|^2 / int_{x1 = r} phi^2 on the unit tube.

    ``mesh`` supplies the volume quadrature for analytic fields (a model or
    cylinder mesh); discrete fields use their own mesh.
    """
    support = mesh if mesh is not None else getattr(phi, "mesh", None)
    if support is None:
        raise DomainError("tube frequency needs a mesh for the volume quadrature")
    samples = []
    for r in r_samples:
        D = region_integrals(phi, tube_below(float(r)), {"grad": grad_sq}, mesh=support)["grad"]
        H = surface_integral(phi, curve(support, "slice", float(r), quad_order))
        samples.append(FrequencySample(Regime.TUBE_MODEL, float(r), D, H, D / H if H != 0.0 else np.nan))
    kept, dropped = apply_drop_rule(samples, getattr(phi, "tail_resolved", False))
    return FrequencyProfile(Regime.TUBE_MODEL.value, kept, field_name=phi.name, dropped=dropped)


def frequency_exterior_model(
    phi: ScalarField,
    r_samples: Iterable[float],
    *,
    mesh: MeridianMesh | None = None,
    frame: Frame | None = None,
    n_rho: int = 64,
    n_angle: int = 64,
) -> FrequencyProfile:
    """
    N^-(r) = r int_{|x| > r, x1 < 0} |grad phi|^2 / int_{Gamma_r^-} phi^2.

    Without a mesh the volume integral uses the polar rule to infinity (closed
    form fields). With a mesh, ``frame`` maps mesh coordinates to the field's
    frame (for example the reflection x1 -> 1 - x1 of a model mesh).
    """
    N = phi.dimension
    samples = []
    for r in r_samples:
        r = float(r)
        if r <= 0.0:
            raise DomainError(f"exterior frequency needs r > 0, got {r}")
        if mesh is None:
            z, s, w = half_space_polar_rule(N, r, None, side="left", n_rho=n_rho, n_angle=n_angle)
            D = point_integrals(phi, z, s, w, {"grad": grad_sq})["grad"]
        else:
            D = region_integrals(phi, exterior_left(r), {"grad": grad_sq}, mesh=mesh, frame=frame)["grad"]
        H = surface_integral(phi, curve(None, "half_sphere_left", r, n_angle, N=N))
        samples.append(FrequencySample(Regime.EXTERIOR_MODEL, r, D, H, r * D / H if H != 0.0 else np.nan))
    kept, dropped = apply_drop_rule(samples, getattr(phi, "tail_resolved", False))
    return FrequencyProfile(Regime.EXTERIOR_MODEL.value, kept, field_name=phi.name, dropped=dropped)


def monotonicity_defect(profile: FrequencyProfile, increasing: bool = True) -> float:
    """Largest violation of monotonicity in r between consecutive samples (0 if monotone)."""
    order = np.argsort(profile.r)
    values = profile.N[order]
    steps = np.diff(values)
    if steps.size == 0:
        return 0.0
    worst = -steps.min() if increasing else steps.max()
    return float(max(worst, 0.0))
