"""Scalar fields on meridian meshes and point location."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, Protocol

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from dumbbell_lab.geometry.models import MeridianMesh

Array = NDArray[np.float64]
_BARY_TOL = 1e-10


@dataclass(frozen=True)
class FieldSample:
    """Values and gradient components of a field at a batch of meridian points."""

    z: Array
    s: Array
    u: Array
    gz: Array
    gs: Array
    nz: Array | None = None
    ns: Array | None = None

    @property
    def grad_sq(self) -> Array:
        return self.gz**2 + self.gs**2

    @property
    def dn(self) -> Array:
        if self.nz is None or self.ns is None:
            raise ValueError("normal derivative requested on a volume sample")
        return self.gz * self.nz + self.gs * self.ns

    def with_normals(self, normals: Array) -> "FieldSample":
        return FieldSample(self.z, self.s, self.u, self.gz, self.gs, normals[:, 0], normals[:, 1])


class ScalarField(Protocol):
    dimension: int
    name: str

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered") -> FieldSample: ...


@dataclass(frozen=True)
class ElementGeometry:
    inverse_jacobians: Array  # (m, 2, 2)
    basis_gradients: Array  # (m, 3, 2)
    origins: Array  # (m, 2)


@lru_cache(maxsize=32)
def element_geometry(mesh: MeridianMesh) -> ElementGeometry:
    p = mesh.vertices[mesh.triangles]
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    Jinv = np.linalg.inv(J)
    g1 = Jinv[:, 0, :]
    g2 = Jinv[:, 1, :]
    grads = np.stack([-g1 - g2, g1, g2], axis=1)
    return ElementGeometry(inverse_jacobians=Jinv, basis_gradients=grads, origins=p[:, 0])


class MeshLocator:
    """Triangle lookup by centroid k-d tree, barycentric test, brute-force fallback."""

    def __init__(self, mesh: MeridianMesh, candidates: int = 16) -> None:
        self.mesh = mesh
        self._geometry = element_geometry(mesh)
        centroids = mesh.vertices[mesh.triangles].mean(axis=1)
        self._tree = cKDTree(centroids)
        self._k = min(candidates, mesh.n_triangles)

    def _bary(self, tri: NDArray[np.int64], pts: Array) -> Array:
        g = self._geometry
        local = np.einsum("...ij,...j->...i", g.inverse_jacobians[tri], pts - g.origins[tri])
        return np.concatenate([1.0 - local.sum(axis=-1, keepdims=True), local], axis=-1)

    def locate(self, z: Array, s: Array) -> tuple[NDArray[np.int64], Array]:
        """Return (triangle index or -1, barycentric coordinates) per point."""
        pts = np.column_stack([np.ravel(z), np.ravel(s)])
        n = pts.shape[0]
        tri = np.full(n, -1, dtype=np.int64)
        bary = np.zeros((n, 3))
        if n == 0:
            return tri, bary
        _, cand = self._tree.query(pts, k=self._k)
        cand = np.asarray(cand).reshape(n, -1)
        lam = self._bary(cand, pts[:, None, :])
        inside = np.all(lam >= -_BARY_TOL, axis=2)
        found = inside.any(axis=1)
        first = np.argmax(inside, axis=1)
        rows = np.flatnonzero(found)
        tri[rows] = cand[rows, first[rows]]
        bary[rows] = lam[rows, first[rows]]
        all_tris = np.arange(self.mesh.n_triangles)
        for i in np.flatnonzero(~found):
            lam_all = self._bary(all_tris, pts[i][None, :])
            hit = np.flatnonzero(np.all(lam_all >= -_BARY_TOL, axis=1))
            if hit.size:
                tri[i] = hit[0]
                bary[i] = lam_all[hit[0]]
        return tri, bary


@lru_cache(maxsize=32)
def locator_for(mesh: MeridianMesh) -> MeshLocator:
    return MeshLocator(mesh)


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """
    Nodal P1 values on a mesh.

    ``tail_resolved`` marks fields whose tiny values carry relative precision
    (recomputed by marching) rather than eigensolver round-off.
    """

    mesh: MeridianMesh
    values: Array
    name: str = "u"
    tail_resolved: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.values.shape != (self.mesh.n_vertices,):
            raise ValueError(
                f"field {self.name!r} has {self.values.shape} values for {self.mesh.n_vertices} vertices"
            )

    @property
    def dimension(self) -> int:
        return self.mesh.dimension

    @classmethod
    def from_function(cls, mesh: MeridianMesh, fn: Callable[[Array, Array], Array], name: str = "u") -> "DiscreteField":
        return cls(mesh=mesh, values=np.asarray(fn(mesh.z, mesh.s), dtype=float), name=name)

    @cached_property
    def element_gradients(self) -> Array:
        grads = element_geometry(self.mesh).basis_gradients
        return np.einsum("mk,mkd->md", self.values[self.mesh.triangles], grads)

    @cached_property
    def nodal_gradients(self) -> Array:
        """Area-weighted average of the element gradients around each vertex."""
        mesh = self.mesh
        weights = np.repeat(mesh.areas, 3)
        idx = mesh.triangles.ravel()
        denom = np.bincount(idx, weights=weights, minlength=mesh.n_vertices)
        out = np.zeros((mesh.n_vertices, 2))
        for d in range(2):
            comp = np.repeat(self.element_gradients[:, d], 3)
            out[:, d] = np.bincount(idx, weights=weights * comp, minlength=mesh.n_vertices)
        return out / np.maximum(denom, 1e-300)[:, None]

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered", fill: float = np.nan) -> FieldSample:
        z = np.ravel(np.asarray(z, dtype=float))
        s = np.ravel(np.asarray(s, dtype=float))
        tri, bary = locator_for(self.mesh).locate(z, s)
        return self.sample_located(z, s, tri, bary, gradient=gradient, fill=fill)

    def sample_located(
        self,
        z: Array,
        s: Array,
        tri: NDArray[np.int64],
        bary: Array,
        *,
        gradient: str = "recovered",
        fill: float = np.nan,
    ) -> FieldSample:
        ok = tri >= 0
        safe = np.where(ok, tri, 0)
        nodes = self.mesh.triangles[safe]
        u = np.einsum("nk,nk->n", bary, self.values[nodes])
        if gradient == "element":
            g = self.element_gradients[safe]
        else:
            g = np.einsum("nk,nkd->nd", bary, self.nodal_gradients[nodes])
        u = np.where(ok, u, fill)
        gz = np.where(ok, g[:, 0], fill)
        gs = np.where(ok, g[:, 1], fill)
        return FieldSample(z, s, u, gz, gs)

    def scaled(self, factor: float, name: str | None = None) -> "DiscreteField":
        return DiscreteField(
            mesh=self.mesh,
            values=factor * self.values,
            name=name or self.name,
            tail_resolved=self.tail_resolved,
            meta=dict(self.meta),
        )

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class AnalyticField:
    """Closed-form field with closed-form gradient."""

    value: Callable[[Array, Array], Array]
    grad: Callable[[Array, Array], tuple[Array, Array]]
    dimension: int
    name: str = "analytic"

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered") -> FieldSample:
        z = np.ravel(np.asarray(z, dtype=float))
        s = np.ravel(np.asarray(s, dtype=float))
        gz, gs = self.grad(z, s)
        return FieldSample(z, s, np.asarray(self.value(z, s), dtype=float), np.asarray(gz, float), np.asarray(gs, float))

    def scaled(self, factor: float) -> "AnalyticField":
        def _grad(z, s):
            gz, gs = self.grad(z, s)
            return factor * gz, factor * gs

        return AnalyticField(lambda z, s: factor * self.value(z, s), _grad, self.dimension, self.name)


def linear_field(N: int, slope: float = 1.0, offset: float = 0.0) -> AnalyticField:
    """u = slope * (x1 - offset)."""
    return AnalyticField(
        value=lambda z, s: slope * (z - offset),
        grad=lambda z, s: (np.full_like(z, slope), np.zeros_like(s)),
        dimension=N,
        name="linear",
    )


@dataclass(frozen=True)
class ReflectedField:
    """x -> base(1 - x1, x'), the reflection through the plane x1 = 1/2."""

    base: ScalarField
    name: str = "reflected"

    @property
    def dimension(self) -> int:
        return self.base.dimension

    def evaluate(self, z: Array, s: Array, *, gradient: str = "recovered") -> FieldSample:
        z = np.ravel(np.asarray(z, dtype=float))
        s = np.ravel(np.asarray(s, dtype=float))
        q = self.base.evaluate(1.0 - z, s, gradient=gradient)
        return FieldSample(z, s, q.u, -q.gz, q.gs)
