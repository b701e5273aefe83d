"""Geometry data types: experiment geometry spec and the meridian mesh."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

TUBE_LENGTH = 1.0
MIN_TRUNCATION_RADIUS = 8.0


class DumbbellSpec(BaseModel):
    """Full experiment geometry of the truncated dumbbell and its mesh grading."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    N: int = Field(default=3, ge=3, description="Space dimension")
    eps: float = Field(description="Channel radius")
    tube_length: float = Field(default=TUBE_LENGTH, description="Channel length (fixed to 1)")
    R_left: float = Field(default=8.0, description="Truncation radius of D- about the origin")
    R_right: float = Field(default=8.0, description="Truncation radius of D+ about e1")
    h_far: float = Field(default=0.5, gt=0, description="Far-field target edge length")
    grading_ratio: float = Field(default=0.7, description="Geometric factor between consecutive edges")
    n_phi: int = Field(default=32, ge=4, description="Angular cells per quarter-plane block")
    min_edge_fraction: float = Field(default=0.125, gt=0, le=0.5, description="Smallest edge as a fraction of eps")
    corridor_cap_fraction: float = Field(default=0.5, gt=0, description="Largest axial corridor edge as a fraction of eps")
    far_stretch: float = Field(default=0.15, gt=0, description="Relative edge cap beyond h_far (edge <= far_stretch * radius)")

    @model_validator(mode="after")
    def _check(self) -> "DumbbellSpec":
        if not 0.0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 0.5), got {self.eps}")
        if self.tube_length != TUBE_LENGTH:
            raise ValueError("tube_length is fixed to 1")
        if self.R_left < MIN_TRUNCATION_RADIUS or self.R_right < MIN_TRUNCATION_RADIUS:
            raise ValueError(
                f"truncation radii must be >= {MIN_TRUNCATION_RADIUS}, got {self.R_left}, {self.R_right}"
            )
        if not 0.0 < self.grading_ratio < 1.0:
            raise ValueError(f"grading_ratio must lie in (0, 1), got {self.grading_ratio}")
        return self

    @property
    def min_edge(self) -> float:
        return self.eps * self.min_edge_fraction

    def refined(self, factor: int = 2) -> "DumbbellSpec":
        """Same geometry with every mesh length divided by ``factor``."""
        return self.model_copy(
            update={
                "n_phi": self.n_phi * factor,
                "grading_ratio": self.grading_ratio ** (1.0 / factor),
                "h_far": self.h_far / factor,
                "min_edge_fraction": self.min_edge_fraction / factor,
                "corridor_cap_fraction": self.corridor_cap_fraction / factor,
                "far_stretch": self.far_stretch / factor,
            }
        )


@dataclass(frozen=True, eq=False)
class MeridianMesh:
    """
    P1 triangulation of a meridian half-plane domain (z = x1, s = |x'|).

    ``boundary`` maps a tag to vertex indices; tags listed in ``dirichlet_tags``
    carry homogeneous Dirichlet data. ``regions`` holds one index into
    ``region_names`` per triangle.
    """

    vertices: NDArray[np.float64]
    triangles: NDArray[np.int64]
    regions: NDArray[np.int64]
    region_names: tuple[str, ...]
    boundary: dict[str, NDArray[np.int64]]
    dirichlet_tags: tuple[str, ...]
    dimension: int
    kind: str
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def z(self) -> NDArray[np.float64]:
        return self.vertices[:, 0]

    @property
    def s(self) -> NDArray[np.float64]:
        return self.vertices[:, 1]

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def axis_weight(self) -> NDArray[np.float64]:
        """Per-vertex factor s^{N-2}."""
        return self.s ** (self.dimension - 2)

    @cached_property
    def areas(self) -> NDArray[np.float64]:
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def dirichlet_mask(self) -> NDArray[np.bool_]:
        mask = np.zeros(self.n_vertices, dtype=bool)
        for tag in self.dirichlet_tags:
            mask[self.boundary.get(tag, np.empty(0, dtype=np.int64))] = True
        return mask

    def region_code(self, name: str) -> int:
        return self.region_names.index(name)

    def region_mask(self, *names: str) -> NDArray[np.bool_]:
        """Triangle mask of the union of the named regions."""
        codes = [self.region_code(n) for n in names]
        return np.isin(self.regions, codes)

    def region_vertices(self, *names: str) -> NDArray[np.int64]:
        return np.unique(self.triangles[self.region_mask(*names)])

    def region_vertex_mask(self, *names: str) -> NDArray[np.bool_]:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[self.region_vertices(*names)] = True
        return mask

    def tagged(self, tag: str) -> NDArray[np.int64]:
        return self.boundary.get(tag, np.empty(0, dtype=np.int64))


@dataclass(frozen=True)
class SamplingCurve:
    """
    Quadrature on a meridian curve carrying the axisymmetric surface measure.

    ``weights`` already include omega_{N-2} s^{N-2} and the arc element;
    ``normals`` hold the unit normal used for d/dnu.
    """

    kind: str
    value: float
    points: NDArray[np.float64]
    normals: NDArray[np.float64]
    weights: NDArray[np.float64]
    gradient_mode: str = "recovered"

    @property
    def z(self) -> NDArray[np.float64]:
        return self.points[:, 0]

    @property
    def s(self) -> NDArray[np.float64]:
        return self.points[:, 1]

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class RegionDescriptor:
    """Volume region given by meridian triangles of ``regions`` and a pointwise predicate."""

    name: str
    predicate: Any
    regions: tuple[str, ...] | None = None

    def contains(self, z: NDArray[np.float64], s: NDArray[np.float64]) -> NDArray[np.bool_]:
        return np.asarray(self.predicate(z, s), dtype=bool)
