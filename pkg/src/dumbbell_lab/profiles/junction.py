"""
Junction profiles on the model domain (unit tube glued to D+).

Phi_1 is the harmonic extension of (x1 - 1)^+ with unit flux through the
junction disk. Phi_2 is the harmonic correction of the tube mode
f = exp(-sqrt(lambda_1) (x1 - 1)) psi_1 continued by zero across the lateral
surface |x'| = 1 in D+. On the mesh, f is replaced by the discrete tube mode of
the assembled operator so that the correction only sees the junction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import eigh

from dumbbell_lab.cross_section.radial import CrossSectionSpectrum, solve_cross_section
from dumbbell_lab.errors import ConfigurationError, SolverError
from dumbbell_lab.fem.assembly import free_vertices, solve_dirichlet, stiffness
from dumbbell_lab.fem.fields import AnalyticField, DiscreteField, FieldSample
from dumbbell_lab.geometry.builder import build_model_mesh
from dumbbell_lab.geometry.models import MeridianMesh
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor, composite_gauss, gauss_legendre

logger = get_logger(__name__)

Array = NDArray[np.float64]
_TOL = 1e-9


# --- closed forms ----------------------------------------------------------

def eval_f(z: Array, s: Array, cross: CrossSectionSpectrum) -> Array:
    """f(x1, x') = exp(-sqrt(lambda_1) (x1 - 1)) psi_1(|x'|); zero for |x'| > 1."""
    z = np.asarray(z, dtype=float)
    return np.exp(-cross.sqrt_lambda1 * (z - 1.0)) * cross.psi1(s)


def eval_h(z: Array, s: Array, cross: CrossSectionSpectrum) -> Array:
    """h(x1, x') = f(1 - x1, x')."""
    return eval_f(1.0 - np.asarray(z, dtype=float), s, cross)


def f_field(cross: CrossSectionSpectrum) -> AnalyticField:
    k = cross.sqrt_lambda1

    def _grad(z, s):
        e = np.exp(-k * (z - 1.0))
        return -k * e * cross.psi1(s), e * cross.dpsi1(s)

    return AnalyticField(lambda z, s: eval_f(z, s, cross), _grad, cross.dimension, "f")


def h_field(cross: CrossSectionSpectrum) -> AnalyticField:
    k = cross.sqrt_lambda1

    def _grad(z, s):
        e = np.exp(k * z)
        return k * e * cross.psi1(s), e * cross.dpsi1(s)

    return AnalyticField(lambda z, s: eval_h(z, s, cross), _grad, cross.dimension, "h")


def harmonic_residual(mesh: MeridianMesh, values: Array) -> float:
    """max |(K v)_i| over free vertices, relative to max_i sum_j |K_ij| * max |v|."""
    K = stiffness(mesh)
    A = K.free_matrix
    r = (K.matrix @ values)[K.free]
    scale = float(abs(A).sum(axis=1).max()) * max(float(np.max(np.abs(values))), 1e-300)
    return float(np.max(np.abs(r)) / scale) if r.size else 0.0


# --- discrete tube mode ----------------------------------------------------

@dataclass(frozen=True)
class TubeMode:
    """
    Separated solution a^{(1 - x1)/dz} psi_h(s) of the discrete tube equations.

    ``rate`` is the per-level growth factor a; ``kappa = log(a) / dz`` is the
    discrete counterpart of sqrt(lambda_1(Sigma)).
    """

    dimension: int
    dz: float
    mu: float
    rate: float
    s_nodes: Array
    values: Array
    slopes: Array

    @property
    def kappa(self) -> float:
        return float(np.log(self.rate) / self.dz)

    def profile(self, s: Array) -> Array:
        return np.interp(np.abs(np.asarray(s, dtype=float)), self.s_nodes, self.values, right=0.0)

    def dprofile(self, s: Array) -> Array:
        return np.interp(np.abs(np.asarray(s, dtype=float)), self.s_nodes, self.slopes, right=0.0)

    def value(self, z: Array, s: Array) -> Array:
        return np.exp(self.kappa * (1.0 - np.asarray(z, dtype=float))) * self.profile(s)

    def gradient(self, z: Array, s: Array) -> tuple[Array, Array]:
        e = np.exp(self.kappa * (1.0 - np.asarray(z, dtype=float)))
        return -self.kappa * e * self.profile(s), e * self.dprofile(s)

    def field(self) -> AnalyticField:
        return AnalyticField(self.value, self.gradient, self.dimension, "tube_mode")


def _column(mesh: MeridianMesh, level: float) -> NDArray[np.int64]:
    idx = np.flatnonzero((np.abs(mesh.z - level) < _TOL) & mesh.region_vertex_mask("tube"))
    return idx[np.argsort(mesh.s[idx])]


def tube_mode(mesh: MeridianMesh) -> TubeMode:
    """
    Discrete tube mode of the stiffness matrix of a model mesh.

    With C the (diagonal) coupling between two adjacent uniform tube levels and
    B_full the in-level block, u_k = rho^k psi solves the tube equations iff
    (B_full - 2C) psi = mu C psi with mu = rho + 1/rho - 2.

    Raises:
        ConfigurationError: If the mesh is not a model mesh.
        SolverError: If the transversal pencil has no positive eigenvalue.
    """
    if mesh.kind != "model":
        raise ConfigurationError(f"tube mode needs a model mesh, got {mesh.kind!r}")
    dz = float(mesh.metadata["tube_dz"])
    length = float(mesh.metadata["tube_length"])
    level = 1.0 - dz * np.round(0.5 * (length + 1.0) / dz)
    col0 = _column(mesh, level)
    col1 = _column(mesh, level + dz)
    if col0.size < 3 or col0.size != col1.size:
        raise SolverError(f"tube levels {level:.4g}, {level + dz:.4g} are not matching columns")
    s_nodes = mesh.s[col0]
    interior = s_nodes < 1.0 - _TOL
    K = stiffness(mesh).matrix.tocsr()
    c = -np.asarray(K[col0, col1]).ravel()[interior]
    B = K[col0][:, col0].toarray()[np.ix_(interior, interior)] - 2.0 * np.diag(c)
    if np.any(c <= 0):
        raise SolverError("nonpositive axial coupling in the tube")
    mus, vecs = eigh(B, np.diag(c), subset_by_index=[0, 0])
    mu = float(mus[0])
    if mu <= 0:
        raise SolverError(f"transversal tube pencil has mu={mu:.3g}")
    rate = 1.0 + 0.5 * mu + np.sqrt(mu + 0.25 * mu * mu)
    psi = np.zeros(s_nodes.shape[0])
    psi[interior] = vecs[:, 0]
    if psi[0] < 0:
        psi = -psi
    sq, wq = composite_gauss(s_nodes, mesh.dimension + 1)
    norm = axisymmetric_factor(mesh.dimension) * np.sum(wq * sq ** (mesh.dimension - 2) * np.interp(sq, s_nodes, psi) ** 2)
    psi = psi / np.sqrt(norm)
    slopes = np.gradient(psi, s_nodes)
    slopes[0] = 0.0
    mode = TubeMode(mesh.dimension, dz, mu, float(rate), s_nodes, psi, slopes)
    logger.info("tube mode: kappa_h=%.8f (dz=%.3g)", mode.kappa, dz)
    return mode


# --- profiles ---------------------------------------------------------------

def _sigma_load(mesh: MeridianMesh) -> Array:
    """b_i = omega_{N-2} int_Sigma s^{N-2} phi_i ds, exact Gauss on the junction column."""
    col = np.flatnonzero(np.abs(mesh.z - 1.0) < _TOL)
    col = col[mesh.s[col] <= 1.0 + _TOL]
    col = col[np.argsort(mesh.s[col])]
    s = mesh.s[col]
    x, w = gauss_legendre(0.0, 1.0, mesh.dimension + 1)
    b = np.zeros(mesh.n_vertices)
    omega = axisymmetric_factor(mesh.dimension)
    for j in range(col.shape[0] - 1):
        h = s[j + 1] - s[j]
        sq = s[j] + h * x
        ws = omega * h * w * sq ** (mesh.dimension - 2)
        b[col[j]] += np.sum(ws * (1.0 - x))
        b[col[j + 1]] += np.sum(ws * x)
    return b


def compute_phi1(mesh: MeridianMesh) -> DiscreteField:
    """
    Phi_1 = w + (x1 - 1)^+ with K w = b, b the unit flux load on the junction disk.

    (x1 - 1)^+ is piecewise linear on the mesh and K (x1 - 1)^+ = -b at free
    vertices, so the result is discrete-harmonic.
    """
    if mesh.kind != "model":
        raise ConfigurationError(f"Phi_1 needs a model mesh, got {mesh.kind!r}")
    K = stiffness(mesh)
    ramp = np.maximum(mesh.z - 1.0, 0.0)
    w = solve_dirichlet(K.matrix, K.free, _sigma_load(mesh), np.zeros(mesh.n_vertices))
    phi1 = DiscreteField(mesh=mesh, values=w + ramp, name="phi1")
    logger.info("Phi_1: max w=%.6g at junction", float(np.max(w)))
    return phi1


def compute_phi2(mesh: MeridianMesh, mode: TubeMode | None = None) -> tuple[DiscreteField, TubeMode]:
    """
    Phi_2 = F + w, F the discrete tube mode continued by zero outside |x'| < 1.

    w solves K w = -K F with w = 0 on the walls and the far tube end and
    w = -F on the outer arc. Rows of K F at uniform tube levels vanish in exact
    arithmetic and are set to zero.
    """
    if mesh.kind != "model":
        raise ConfigurationError(f"Phi_2 needs a model mesh, got {mesh.kind!r}")
    mode = mode or tube_mode(mesh)
    K = stiffness(mesh)
    F = np.where(mesh.s <= 1.0 + _TOL, mode.value(mesh.z, mesh.s), 0.0)
    rhs = -(K.matrix @ F)
    dz = mode.dz
    z_far = -float(mesh.metadata["tube_length"])
    exact = (mesh.z > z_far + 2.5 * dz) & (mesh.z < 1.0 - 1.5 * dz)
    rhs[exact] = 0.0
    boundary = np.zeros(mesh.n_vertices)
    outer = mesh.tagged("outer")
    boundary[outer] = -F[outer]
    w = solve_dirichlet(K.matrix, K.free, rhs, boundary)
    phi2 = DiscreteField(mesh=mesh, values=F + w, name="phi2", meta={"correction": w, "mode": F})
    logger.info("Phi_2: max correction %.6g, min correction %.3g", float(np.max(w)), float(np.min(w)))
    return phi2, mode


@dataclass(frozen=True)
class ExtendedProfile:
    """
    A profile on the model mesh with closed-form continuations off the mesh.

    ``tube`` is used for x1 <= 1 beyond the far tube end, ``far`` beyond the
    outer arc.
    """

    field: DiscreteField
    tube: AnalyticField
    far: AnalyticField
    name: str = "profile"

    @property
    def dimension(self) -> int:
        return self.field.dimension

    @property
    def mesh(self) -> MeridianMesh:
        return self.field.mesh

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered") -> FieldSample:
        z = np.ravel(np.asarray(z, dtype=float))
        s = np.ravel(np.asarray(s, dtype=float))
        sample = self.field.evaluate(z, s, gradient=gradient)
        missing = ~np.isfinite(sample.u)
        if not missing.any():
            return sample
        u, gz, gs = sample.u.copy(), sample.gz.copy(), sample.gs.copy()
        for ext, mask in ((self.tube, missing & (z <= 1.0)), (self.far, missing & (z > 1.0))):
            if mask.any():
                q = ext.evaluate(z[mask], s[mask])
                u[mask], gz[mask], gs[mask] = q.u, q.gz, q.gs
        return FieldSample(z, s, u, gz, gs)

    def __call__(self, z: Array, s: Array) -> Array:
        return self.evaluate(z, s).u


def _zero_field(N: int) -> AnalyticField:
    return AnalyticField(lambda z, s: np.zeros_like(z), lambda z, s: (np.zeros_like(z), np.zeros_like(s)), N, "zero")


@dataclass(frozen=True)
class ProfilePair:
    phi1: ExtendedProfile
    phi2: ExtendedProfile
    mode: TubeMode
    cross: CrossSectionSpectrum
    metadata: dict = field(default_factory=dict)

    @property
    def mesh(self) -> MeridianMesh:
        return self.phi1.mesh


def compute_profiles(mesh: MeridianMesh, cross: CrossSectionSpectrum | None = None) -> ProfilePair:
    N = mesh.dimension
    cross = cross or solve_cross_section(N)
    phi1 = compute_phi1(mesh)
    phi2, mode = compute_phi2(mesh)
    ramp = AnalyticField(
        lambda z, s: z - 1.0, lambda z, s: (np.ones_like(z), np.zeros_like(s)), N, "ramp"
    )
    return ProfilePair(
        phi1=ExtendedProfile(phi1, tube=_zero_field(N), far=ramp, name="phi1"),
        phi2=ExtendedProfile(phi2, tube=mode.field(), far=_zero_field(N), name="phi2"),
        mode=mode,
        cross=cross,
        metadata={
            "tube_length": float(mesh.metadata["tube_length"]),
            "radius": float(mesh.metadata["radius"]),
            "tube_dz": float(mesh.metadata["tube_dz"]),
            "n_vertices": mesh.n_vertices,
            "kappa_h": mode.kappa,
            "sqrt_lambda1": cross.sqrt_lambda1,
        },
    )


# --- checks -----------------------------------------------------------------

@dataclass(frozen=True)
class ProfileBounds:
    phi1_minus_ramp: float
    phi2_minus_mode: float
    phi2_min: float
    interior_min_phi1: float
    interior_min_phi2: float
    harmonic_phi1: float
    harmonic_phi2: float
    kappa_h: float
    sqrt_lambda1: float

    @property
    def kappa_relative_error(self) -> float:
        return abs(self.kappa_h - self.sqrt_lambda1) / self.sqrt_lambda1


def profile_bounds(pair: ProfilePair) -> ProfileBounds:
    """Nodewise lower bounds and positivity of both profiles."""
    mesh = pair.mesh
    v1 = pair.phi1.field.values
    v2 = pair.phi2.field.values
    tube = mesh.region_vertex_mask("tube")
    correction = pair.phi2.field.meta["correction"]
    free = np.zeros(mesh.n_vertices, dtype=bool)
    free[free_vertices(mesh)] = True
    interior = free & (mesh.s > _TOL)
    return ProfileBounds(
        phi1_minus_ramp=float(np.min(v1 - np.maximum(mesh.z - 1.0, 0.0))),
        phi2_minus_mode=float(np.min(correction[tube])),
        phi2_min=float(np.min(v2)),
        interior_min_phi1=float(np.min(v1[interior])),
        interior_min_phi2=float(np.min(v2[interior])),
        harmonic_phi1=harmonic_residual(mesh, v1),
        harmonic_phi2=harmonic_residual(mesh, v2),
        kappa_h=pair.mode.kappa,
        sqrt_lambda1=pair.cross.sqrt_lambda1,
    )


@dataclass(frozen=True)
class DecayCheck:
    constant: float
    worst_ratio: float
    samples: int

    @property
    def holds(self) -> bool:
        return self.worst_ratio <= 1.0 + 1e-8


def tube_decay_check(pair: ProfilePair, n_samples: int = 200) -> DecayCheck:
    """
    Phi_1(x1, 0) <= C_2 exp(sqrt(lambda_1) (x1 - 1) / 2) on the truncated tube.

    C_2 is fitted at x1 = 0; the worst ratio over the samples is reported.
    """
    k = pair.cross.sqrt_lambda1
    length = pair.metadata["tube_length"]
    x = np.linspace(-length, 0.0, n_samples)
    values = pair.phi1(x, np.zeros_like(x))
    bound = np.exp(0.5 * k * (x - 1.0))
    c2 = float(values[-1] / bound[-1])
    return DecayCheck(constant=c2, worst_ratio=float(np.max(values / (c2 * bound))), samples=n_samples)


def far_field_constant(
    profile: ExtendedProfile,
    target: Callable[[Array, Array], Array],
    radii: tuple[float, ...] = (4.0,),
    n_angle: int = 32,
) -> float:
    """
    Smallest c with |profile - target| <= c (x1 - 1) / |x - e1|^N on the sampled arcs.
    """
    N = profile.dimension
    alpha, _ = gauss_legendre(0.0, 0.5 * np.pi, n_angle)
    worst = 0.0
    for rho in radii:
        z = 1.0 + rho * np.cos(alpha)
        s = rho * np.sin(alpha)
        gap = np.abs(profile(z, s) - target(z, s))
        worst = max(worst, float(np.max(gap * rho**N / (z - 1.0))))
    return worst


def phi1_far_field(pair: ProfilePair, radii: tuple[float, ...] = (4.0,)) -> float:
    return far_field_constant(pair.phi1, lambda z, s: z - 1.0, radii)


def phi2_far_field(pair: ProfilePair, radii: tuple[float, ...] = (4.0,)) -> float:
    return far_field_constant(pair.phi2, lambda z, s: np.zeros_like(z), radii)


def tube_length_robustness(N: int, tube_length: float = 12.0, window: tuple[float, float] = (-2.0, 1.0), **mesh_kwargs) -> float:
    """Relative change of Phi_1 on ``window`` when the tube length is doubled."""
    short = compute_phi1(build_model_mesh(N, tube_length=tube_length, **mesh_kwargs))
    long = compute_phi1(build_model_mesh(N, tube_length=2.0 * tube_length, **mesh_kwargs))
    mesh = short.mesh
    keep = (mesh.z >= window[0] - _TOL) & (mesh.z <= window[1] + _TOL) & (mesh.s <= 1.0 + _TOL)
    other = long.evaluate(mesh.z[keep], mesh.s[keep]).u
    scale = float(np.max(np.abs(short.values[keep])))
    return float(np.max(np.abs(short.values[keep] - other)) / scale)
