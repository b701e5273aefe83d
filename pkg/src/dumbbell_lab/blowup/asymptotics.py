"""H_U, the Y_1 projection mu, power-law fits and the two estimates of beta."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.cross_section.angular import angular_profile
from dumbbell_lab.errors import BetaSignError, DomainError, FitError
from dumbbell_lab.fem.fields import FieldSample, ScalarField
from dumbbell_lab.fem.integrals import region_integrals, surface_integrals, u_sq
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.geometry.regions import everywhere
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)

Array = NDArray[np.float64]

MIN_FIT_SAMPLES = 5


def _check_window(lambdas: Array, window: tuple[float, float] | None) -> None:
    if window is None:
        return
    lo, hi = window
    bad = (lambdas < lo - 1e-12) | (lambdas > hi + 1e-12)
    if np.any(bad):
        raise DomainError(f"lambda samples {lambdas[bad]} outside [{lo:g}, {hi:g}]")


def _y1_integrand(N: int):
    profile = angular_profile(N)

    def _u_y1(q: FieldSample) -> Array:
        return q.u * profile.y1_at(q.z, q.s)

    return _u_y1


def trace_samples(
    U: ScalarField,
    lambdas: Sequence[float],
    *,
    window: tuple[float, float] | None = None,
    quad_order: int = 48,
) -> tuple[Array, Array, Array]:
    """
    (H_U, mu, trace mean) at each lambda.

    H_U(lam) = lam^{1-N} int_{Gamma_lam^-} U^2, mu(lam) = lam^{1-N} int_{Gamma_lam^-} U Y_1.
    """
    lam = np.asarray(lambdas, dtype=float)
    _check_window(lam, window)
    N = U.dimension
    integrands = {"u2": u_sq, "uy": _y1_integrand(N), "u": lambda q: q.u}
    H, mu, mean = np.zeros(lam.size), np.zeros(lam.size), np.zeros(lam.size)
    for i, value in enumerate(lam):
        g = surface_integrals(U, curve(None, "half_sphere_left", float(value), quad_order, N=N), integrands)
        scale = value ** (1 - N)
        H[i] = scale * g["u2"]
        mu[i] = scale * g["uy"]
        mean[i] = g["u"]
    return H, mu, mean


def h_u(U: ScalarField, lambdas: Sequence[float], **kwargs) -> Array:
    return trace_samples(U, lambdas, **kwargs)[0]


def mu(U: ScalarField, lambdas: Sequence[float], **kwargs) -> Array:
    return trace_samples(U, lambdas, **kwargs)[1]


@dataclass(frozen=True)
class FitResult:
    exponent: float
    coefficient: float
    rms: float
    window: tuple[float, float]


def fit_power(lambdas: Sequence[float], values: Sequence[float]) -> FitResult:
    """
    Least-squares fit of log(values) = log(coefficient) + exponent * log(lambda).

    Raises:
        FitError: With fewer than two samples, a degenerate window or nonpositive values.
    """
    x = np.asarray(lambdas, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise FitError(f"power fit needs two or more paired samples, got {x.size}")
    if np.any(x <= 0.0) or np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise FitError("power fit needs positive finite samples")
    if x.min() >= x.max():
        raise FitError("power fit window is degenerate")
    if x.size < MIN_FIT_SAMPLES:
        logger.warning("power fit with only %d samples", x.size)
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    resid = np.log(y) - (intercept + slope * np.log(x))
    return FitResult(
        exponent=float(slope),
        coefficient=float(np.exp(intercept)),
        rms=float(np.sqrt(np.mean(resid**2))),
        window=(float(x.min()), float(x.max())),
    )


@dataclass(frozen=True)
class BetaEstimate:
    beta: float
    beta_mu: float
    exponent: FitResult
    trace_sign: float


def _limit_at_zero(lambdas: Array, values: Array) -> float:
    """Intercept of the linear fit of ``values`` against lambda^2."""
    return float(np.polyfit(lambdas**2, values, 1)[1])


def beta_from_fit(
    U: ScalarField,
    lambdas: Sequence[float],
    *,
    window: tuple[float, float] | None = None,
    quad_order: int = 48,
) -> BetaEstimate:
    """
    beta from the small-lambda limits of lam^{2(N-1)} H_U and lam^{N-1} mu.

    |beta| = sqrt(lim lam^{2(N-1)} H_U) / Upsilon_N with the sign opposite to
    the trace of U on Gamma_lam^- (x1 < 0 there); independently
    beta_mu = -lim lam^{N-1} mu / Upsilon_N.

    Raises:
        BetaSignError: If the two estimators disagree in sign.
        FitError: If the H_U samples cannot be fitted.
    """
    lam = np.asarray(lambdas, dtype=float)
    N = U.dimension
    upsilon = angular_profile(N).upsilon
    H, mu_values, mean = trace_samples(U, lam, window=window, quad_order=quad_order)
    exponent = fit_power(lam, H)
    a0 = _limit_at_zero(lam, lam ** (2 * (N - 1)) * H)
    if a0 <= 0.0:
        raise FitError(f"extrapolated lam^(2(N-1)) H_U is nonpositive ({a0:.3e})")
    b0 = _limit_at_zero(lam, lam ** (N - 1) * mu_values)
    trace_sign = float(np.sign(mean[np.argmin(lam)]))
    beta = -trace_sign * np.sqrt(a0) / upsilon
    beta_mu = -b0 / upsilon
    if np.sign(beta) != np.sign(beta_mu):
        raise BetaSignError(f"beta from H_U ({beta:.4g}) and from mu ({beta_mu:.4g}) disagree in sign")
    logger.info("beta fit: %.6g (mu: %.6g), H_U exponent %.4f", beta, beta_mu, exponent.exponent)
    return BetaEstimate(beta=float(beta), beta_mu=float(beta_mu), exponent=exponent, trace_sign=trace_sign)


@dataclass(frozen=True)
class GrowthBounds:
    """Worst ratios of H_U against its two power-law envelopes; 1 is the threshold for both."""

    upper_ratio: float
    lower_ratio: float
    rho: float
    lambda_rho: float

    @property
    def holds(self) -> bool:
        return self.upper_ratio <= 1.0 and self.lower_ratio >= 1.0


def h_u_growth_bounds(
    U: ScalarField,
    lambdas: Sequence[float],
    H: Sequence[float],
    *,
    k_tilde: float,
    delta: float,
    rho: float = 0.5,
    quad_order: int = 48,
) -> GrowthBounds:
    """
    Check H_U between two power laws on the sampled window.

    Upper: H_U(lam) <= e^{2 delta (N-1+delta) k} k^{2(N-1)} H_U(k) lam^{-2(N-1)} with k = k_tilde.
    Lower: H_U(lam) >= H_U(lam_rho) (lam_rho / lam)^{2(N-1-rho)} for lam below
    lam_rho, the largest sample.

    Raises:
        FitError: With fewer than two paired samples.
        DomainError: If a sample is not below ``k_tilde``.
    """
    lam = np.asarray(lambdas, dtype=float)
    values = np.asarray(H, dtype=float)
    if lam.size < 2 or lam.size != values.size:
        raise FitError(f"growth bounds need two or more paired samples, got {lam.size}")
    if np.any(lam >= k_tilde):
        raise DomainError(f"growth bounds need lambda < k_tilde={k_tilde:g}")
    N = U.dimension
    h_k = float(trace_samples(U, [k_tilde], quad_order=quad_order)[0][0])
    upper = np.exp(2.0 * delta * (N - 1 + delta) * k_tilde) * k_tilde ** (2 * (N - 1)) * h_k * lam ** (-2.0 * (N - 1))
    top = int(np.argmax(lam))
    lam_rho = float(lam[top])
    below = lam < lam_rho
    lower = values[top] * (lam_rho / lam[below]) ** (2.0 * (N - 1 - rho))
    return GrowthBounds(
        upper_ratio=float(np.max(values / upper)),
        lower_ratio=float(np.min(values[below] / lower)),
        rho=rho,
        lambda_rho=lam_rho,
    )


@dataclass(frozen=True)
class BetaFormula:
    surface: float
    volume: float
    beta: float

    @property
    def bracket(self) -> float:
        return self.surface - self.volume


def beta_from_formula(
    U: ScalarField,
    weight: PWeight,
    lambda_k0: float,
    *,
    mesh: MeridianMesh | None = None,
    quad_order: int = 64,
) -> BetaFormula:
    """
    beta = -[int_{Gamma_1^-} U Y_1 - (lam/N) int_{D-} p U Y_1 k(x)] / Upsilon_N

    with k(x) = |x| inside B_1 and |x|^{1-N} outside. The volume term runs over
    the left region of ``mesh`` (or U's own mesh); it is skipped when p has no
    D- bump.

    Raises:
        DomainError: If p has D- bumps and no quadrature mesh is available.
    """
    N = U.dimension
    profile = angular_profile(N)
    u_y1 = _y1_integrand(N)
    surface = surface_integrals(U, curve(None, "half_sphere_left", 1.0, quad_order, N=N), {"s": u_y1})["s"]
    volume = 0.0
    if weight.minus_bumps:
        support = mesh if mesh is not None else getattr(U, "mesh", None)
        if support is None:
            raise DomainError("the volume term of the beta formula needs a mesh")

        def _integrand(q: FieldSample) -> Array:
            r = np.hypot(q.z, q.s)
            kernel = np.where(r < 1.0, r, r ** (1 - N))
            return weight.eval_p(q.z, q.s) * u_y1(q) * kernel

        volume = (lambda_k0 / N) * region_integrals(U, everywhere(("left",)), {"v": _integrand}, mesh=support)["v"]
    beta = -(surface - volume) / profile.upsilon
    return BetaFormula(surface=float(surface), volume=float(volume), beta=float(beta))


@dataclass(frozen=True)
class MuExpansion:
    bracket: float
    lambdas: tuple[float, ...]
    deviations: tuple[float, ...]
    correction_exponent: float | None

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.deviations else 0.0


def mu_expansion_check(
    U: ScalarField,
    weight: PWeight,
    lambda_k0: float,
    lambdas: Sequence[float],
    *,
    mesh: MeridianMesh | None = None,
    window: tuple[float, float] | None = None,
    quad_order: int = 48,
) -> MuExpansion:
    """
    |lam^{N-1} mu(lam) - bracket| across ``lambdas``, with the bracket of the beta formula.

    The correction exponent is the log-log slope of the deviations (None when
    a deviation vanishes).
    """
    lam = np.asarray(lambdas, dtype=float)
    N = U.dimension
    formula = beta_from_formula(U, weight, lambda_k0, mesh=mesh)
    mu_values = trace_samples(U, lam, window=window, quad_order=quad_order)[1]
    dev = np.abs(lam ** (N - 1) * mu_values - formula.bracket)
    exponent = None
    if lam.size >= 2 and np.all(dev > 0.0):
        exponent = float(np.polyfit(np.log(lam), np.log(dev), 1)[0])
    return MuExpansion(
        bracket=formula.bracket,
        lambdas=tuple(lam.tolist()),
        deviations=tuple(dev.tolist()),
        correction_exponent=exponent,
    )
