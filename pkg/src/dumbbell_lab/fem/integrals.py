"""Surface integrals over sampling curves and volume integrals over regions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import DomainError
from dumbbell_lab.fem.assembly import midpoint_points
from dumbbell_lab.fem.fields import DiscreteField, FieldSample, ScalarField
from dumbbell_lab.geometry.models import MeridianMesh, RegionDescriptor, SamplingCurve
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.utils.quadrature import axisymmetric_factor

logger = get_logger(__name__)

Array = NDArray[np.float64]
Integrand = Callable[[FieldSample], Array]
Frame = Callable[[Array, Array], tuple[Array, Array]]

_MIDPOINT_BARY = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
_SUBDIVISIONS = 4


def _subdivided_rule(n: int) -> tuple[Array, Array]:
    """Edge-midpoint rule on the n*n uniform subtriangles of the reference triangle."""
    corners = []
    for i in range(n):
        for j in range(n - i):
            a = np.array([i, j]) / n
            b = np.array([i + 1, j]) / n
            c = np.array([i, j + 1]) / n
            corners.append((a, b, c))
            if i + j < n - 1:
                d = np.array([i + 1, j + 1]) / n
                corners.append((b, d, c))
    pts = []
    for a, b, c in corners:
        for mid in ((a + b) / 2, (b + c) / 2, (a + c) / 2):
            pts.append([1.0 - mid.sum(), mid[0], mid[1]])
    bary = np.array(pts)
    weights = np.full(bary.shape[0], 1.0 / bary.shape[0])
    return bary, weights


_SUB_BARY, _SUB_WEIGHTS = _subdivided_rule(_SUBDIVISIONS)
# one centroid per subtriangle; its three midpoints are kept or dropped together
_SUB_CENTROIDS = _SUB_BARY.reshape(-1, 3, 3).mean(axis=1)


# --- standard integrands ---------------------------------------------------

def u_sq(q: FieldSample) -> Array:
    return q.u**2


def grad_sq(q: FieldSample) -> Array:
    return q.grad_sq


def dz_sq(q: FieldSample) -> Array:
    return q.gz**2


def u_dz(q: FieldSample) -> Array:
    return q.u * q.gz


def dn_sq(q: FieldSample) -> Array:
    return q.dn**2


def u_dn(q: FieldSample) -> Array:
    return q.u * q.dn


def u_value(q: FieldSample) -> Array:
    return q.u


# --- rules -----------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Points (in the field frame) with weights that include omega_{N-2} s^{N-2}."""

    z: Array
    s: Array
    weights: Array
    triangles: NDArray[np.int64] | None = None
    barycentric: Array | None = None
    mesh: MeridianMesh | None = None

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])


@lru_cache(maxsize=32)
def _base_points(mesh: MeridianMesh) -> tuple[Array, Array]:
    mid = midpoint_points(mesh)
    w = axisymmetric_factor(mesh.dimension) * (mesh.areas[:, None] / 3.0) * mid[:, :, 1] ** (mesh.dimension - 2)
    return mid, w


def mesh_region_rule(mesh: MeridianMesh, region: RegionDescriptor, frame: Frame | None = None) -> QuadratureRule:
    """
    Quadrature for ``region`` built on ``mesh``.

    Triangles whose vertices and centroid agree on membership use the
    edge-midpoint rule; cut triangles use a 16-fold subdivided rule that keeps
    the subtriangles whose centroid satisfies the predicate. ``frame`` maps mesh
    coordinates to the field frame (an isometry preserving s).
    """
    mapper = frame or (lambda z, s: (z, s))
    tri_ok = np.ones(mesh.n_triangles, dtype=bool) if region.regions is None else mesh.region_mask(*region.regions)
    tri_idx = np.flatnonzero(tri_ok)
    p = mesh.vertices[mesh.triangles[tri_idx]]
    vz, vs = mapper(p[:, :, 0].ravel(), p[:, :, 1].ravel())
    vin = region.contains(vz, vs).reshape(-1, 3)
    cz, cs = mapper(p[:, :, 0].mean(axis=1), p[:, :, 1].mean(axis=1))
    cin = region.contains(cz, cs)
    full = vin.all(axis=1) & cin
    cut = (vin.any(axis=1) | cin) & ~full

    mid, base_w = _base_points(mesh)
    full_tris = tri_idx[full]
    z_parts = [mid[full_tris, :, 0].ravel()]
    s_parts = [mid[full_tris, :, 1].ravel()]
    w_parts = [base_w[full_tris].ravel()]
    t_parts = [np.repeat(full_tris, 3)]
    b_parts = [np.tile(_MIDPOINT_BARY, (full_tris.shape[0], 1))]

    cut_tris = tri_idx[cut]
    if cut_tris.size:
        pc = mesh.vertices[mesh.triangles[cut_tris]]
        pts = np.einsum("qk,mkd->mqd", _SUB_BARY, pc)
        sz, ss = pts[:, :, 0].ravel(), pts[:, :, 1].ravel()
        w = (
            axisymmetric_factor(mesh.dimension)
            * (mesh.areas[cut_tris][:, None] * _SUB_WEIGHTS[None, :]).ravel()
            * ss ** (mesh.dimension - 2)
        )
        centroids = np.einsum("qk,mkd->mqd", _SUB_CENTROIDS, pc)
        cz, cs = mapper(centroids[:, :, 0].ravel(), centroids[:, :, 1].ravel())
        keep = np.repeat(region.contains(cz, cs).reshape(cut_tris.shape[0], -1), 3, axis=1).ravel()
        z_parts.append(sz[keep])
        s_parts.append(ss[keep])
        w_parts.append(w[keep])
        t_parts.append(np.repeat(cut_tris, _SUB_BARY.shape[0])[keep])
        b_parts.append(np.tile(_SUB_BARY, (cut_tris.shape[0], 1))[keep])

    z = np.concatenate(z_parts)
    s = np.concatenate(s_parts)
    fz, fs = mapper(z, s)
    return QuadratureRule(
        z=np.asarray(fz, dtype=float),
        s=np.asarray(fs, dtype=float),
        weights=np.concatenate(w_parts),
        triangles=np.concatenate(t_parts).astype(np.int64),
        barycentric=np.concatenate(b_parts) if b_parts else None,
        mesh=mesh if frame is None else None,
    )


def sample_rule(field: ScalarField, rule: QuadratureRule) -> FieldSample:
    """Evaluate ``field`` at the rule points; P1 fields on the rule's mesh use element gradients."""
    if isinstance(field, DiscreteField) and rule.mesh is not None and field.mesh is rule.mesh:
        return field.sample_located(rule.z, rule.s, rule.triangles, rule.barycentric, gradient="element")
    return field.evaluate(rule.z, rule.s, gradient="element")


def integrate_rule(field: ScalarField, rule: QuadratureRule, integrands: Mapping[str, Integrand]) -> dict[str, float]:
    if rule.size == 0:
        return {key: 0.0 for key in integrands}
    sample = sample_rule(field, rule)
    return {key: float(np.sum(rule.weights * fn(sample))) for key, fn in integrands.items()}


def region_integrals(
    field: ScalarField,
    region: RegionDescriptor,
    integrands: Mapping[str, Integrand],
    *,
    mesh: MeridianMesh | None = None,
    frame: Frame | None = None,
) -> dict[str, float]:
    """
    Several volume integrals over one region, sharing a single quadrature.

    Raises:
        DomainError: If no quadrature mesh is available.
    """
    support = mesh if mesh is not None else getattr(field, "mesh", None)
    if support is None:
        raise DomainError(f"no quadrature mesh for field {getattr(field, 'name', '?')!r}")
    rule = mesh_region_rule(support, region, frame)
    if rule.size == 0:
        logger.warning("region %s is empty on the %s mesh", region.name, support.kind)
    return integrate_rule(field, rule, integrands)


def region_integral(
    field: ScalarField,
    region: RegionDescriptor,
    integrand: Integrand,
    *,
    mesh: MeridianMesh | None = None,
    frame: Frame | None = None,
) -> float:
    """Axisymmetric volume integral of ``integrand`` over ``region``."""
    return region_integrals(field, region, {"value": integrand}, mesh=mesh, frame=frame)["value"]


def sample_curve(field: ScalarField, curve: SamplingCurve) -> FieldSample:
    sample = field.evaluate(curve.z, curve.s, gradient=curve.gradient_mode)
    if not np.all(np.isfinite(sample.u)):
        raise DomainError(f"{curve.kind}({curve.value:g}) leaves the domain of field {getattr(field, 'name', '?')!r}")
    return sample.with_normals(curve.normals)


def surface_integrals(field: ScalarField, curve: SamplingCurve, integrands: Mapping[str, Integrand]) -> dict[str, float]:
    sample = sample_curve(field, curve)
    return {key: float(np.sum(curve.weights * fn(sample))) for key, fn in integrands.items()}


def surface_integral(field: ScalarField, curve: SamplingCurve, integrand: Integrand = u_sq) -> float:
    """Raw surface integral (no t^{1-N} scaling) of ``integrand`` over ``curve``."""
    return surface_integrals(field, curve, {"value": integrand})["value"]


def point_integrals(
    field: ScalarField,
    z: Array,
    s: Array,
    weights: Array,
    integrands: Mapping[str, Integrand],
) -> dict[str, float]:
    """Integrals with an explicit point rule (analytic polar rules)."""
    sample = field.evaluate(z, s, gradient="recovered")
    return {key: float(np.sum(weights * fn(sample))) for key, fn in integrands.items()}
