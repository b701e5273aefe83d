"""Quadrature helpers shared by the meridian-plane integrals."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.special import gamma


def sphere_measure(k: int) -> float:
    """Surface measure of the unit sphere S^k in R^{k+1}."""
    if k < 0:
        raise ValueError(f"sphere dimension must be non-negative, got {k}")
    return float(2.0 * np.pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0))


def axisymmetric_factor(N: int) -> float:
    """omega_{N-2}: the measure of the orbit of a unit-distance point about the x1-axis."""
    return sphere_measure(N - 2)


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(a: float, b: float, n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def composite_gauss(breaks: NDArray[np.float64], n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre rule with ``n`` nodes on each interval of ``breaks``."""
    x, w = _leggauss(int(n))
    a = np.asarray(breaks[:-1], dtype=float)[:, None]
    b = np.asarray(breaks[1:], dtype=float)[:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x[None, :]
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def half_space_polar_rule(
    N: int,
    rho_min: float,
    rho_max: float | None,
    *,
    side: str = "left",
    n_rho: int = 48,
    n_angle: int = 48,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """
    Polar volume rule on a half-annulus {rho_min < |x| < rho_max} of a half-space.

    ``side='left'`` covers x1 < 0, ``side='right'`` covers x1 > 0 (both centered at
    the origin). ``rho_max=None`` integrates to infinity through the substitution
    sigma = 1/rho.

    Returns:
        (z, s, weights) with the full N-dimensional volume element folded in.
    """
    if side == "left":
        alpha, w_alpha = gauss_legendre(0.5 * np.pi, np.pi, n_angle)
    elif side == "right":
        alpha, w_alpha = gauss_legendre(0.0, 0.5 * np.pi, n_angle)
    else:
        raise ValueError(f"unknown side {side!r}")
    if rho_max is None:
        sigma, w_sigma = gauss_legendre(0.0, 1.0 / rho_min, n_rho)
        rho = 1.0 / sigma
        w_rho = w_sigma / sigma**2
    else:
        rho, w_rho = gauss_legendre(rho_min, rho_max, n_rho)
    R, A = np.meshgrid(rho, alpha, indexing="ij")
    WR, WA = np.meshgrid(w_rho, w_alpha, indexing="ij")
    s = R * np.sin(A)
    z = R * np.cos(A)
    weights = axisymmetric_factor(N) * WR * WA * R ** (N - 1) * np.sin(A) ** (N - 2)
    return z.ravel(), s.ravel(), weights.ravel()
