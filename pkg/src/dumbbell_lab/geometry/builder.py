"""
Graded P1 meshes of meridian domains.

Every mesh is glued from two kinds of blocks: polar blocks (quarter discs or
annuli about a point on the axis) and tensor blocks (axis-aligned rectangles).
Blocks share node sequences along common edges, so gluing is a deduplication
of coincident vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.geometry.models import DumbbellSpec, MeridianMesh
from dumbbell_lab.utils.logging import get_logger

logger = get_logger(__name__)

_SNAP = 1e-15
_DEDUP_DECIMALS = 11


@dataclass(frozen=True)
class _Block:
    points: NDArray[np.float64]
    triangles: NDArray[np.int64]
    region: str


def junction_nodes(junction: float, min_edge: float, ratio: float, cap: float) -> NDArray[np.float64]:
    """Nodes of [0, junction], edges growing by 1/ratio away from ``junction``."""
    nodes = [junction]
    x, h = junction, min_edge
    while True:
        x -= h
        if x <= 0.5 * h:
            break
        nodes.append(x)
        h = min(h / ratio, cap)
    nodes.append(0.0)
    return np.array(nodes[::-1])


def outer_nodes(
    start: float,
    outer: float,
    min_edge: float,
    ratio: float,
    h_far: float,
    stretch: float,
) -> NDArray[np.float64]:
    """Nodes of [start, outer] graded away from ``start``; edges capped by max(h_far, stretch*x)."""
    nodes = [start]
    x, h = start, min_edge
    while x + h < outer - 0.5 * h:
        x += h
        nodes.append(x)
        h = min(h / ratio, max(h_far, stretch * x))
    nodes.append(outer)
    return np.array(nodes)


def axial_nodes(length: float, min_edge: float, ratio: float, cap: float) -> NDArray[np.float64]:
    """Nodes of [0, length] graded toward both ends; the end edges are min(min_edge, cap)."""
    half = [0.0]
    x, h = 0.0, min(min_edge, cap)
    while x + h < 0.5 * length - 0.25 * h:
        x += h
        half.append(x)
        h = min(h / ratio, cap)
    half_arr = np.array(half)
    nodes = np.concatenate([half_arr, [0.5 * length], length - half_arr[::-1]])
    return np.unique(nodes)


def _snap(values: NDArray[np.float64]) -> NDArray[np.float64]:
    values = values.copy()
    values[np.abs(values) < _SNAP] = 0.0
    return values


def polar_block(
    center: float,
    radii: NDArray[np.float64],
    phi_start: float,
    phi_end: float,
    n_phi: int,
    region: str,
) -> _Block:
    """Polar grid about (center, 0); ``radii[0] == 0`` gives a fan at the center."""
    phi = np.linspace(phi_start, phi_end, n_phi + 1)
    cos_phi = _snap(np.cos(phi))
    sin_phi = _snap(np.sin(phi))
    rho = np.asarray(radii, dtype=float)
    has_center = rho[0] == 0.0
    rings = rho[1:] if has_center else rho
    n_a = n_phi + 1

    z = center + rings[:, None] * cos_phi[None, :]
    s = rings[:, None] * sin_phi[None, :]
    points = np.column_stack([z.ravel(), s.ravel()])
    offset = 0
    tris: list[NDArray[np.int64]] = []
    if has_center:
        points = np.vstack([[center, 0.0], points])
        offset = 1
        j = np.arange(n_phi)
        tris.append(np.column_stack([np.zeros(n_phi, dtype=np.int64), offset + j, offset + j + 1]))

    n_r = rings.shape[0]
    if n_r > 1:
        i, j = np.meshgrid(np.arange(n_r - 1), np.arange(n_phi), indexing="ij")
        i, j = i.ravel(), j.ravel()
        a = offset + i * n_a + j
        b = offset + (i + 1) * n_a + j
        c = offset + (i + 1) * n_a + j + 1
        d = offset + i * n_a + j + 1
        tris.append(np.column_stack([a, b, c]))
        tris.append(np.column_stack([a, c, d]))
    return _Block(points=points, triangles=np.vstack(tris).astype(np.int64), region=region)


def tensor_block(z_nodes: NDArray[np.float64], s_nodes: NDArray[np.float64], region: str) -> _Block:
    """Rectangle grid; each cell is split along its (i, j)-(i+1, j+1) diagonal."""
    Z, S = np.meshgrid(z_nodes, s_nodes, indexing="ij")
    points = np.column_stack([Z.ravel(), S.ravel()])
    n_s = s_nodes.shape[0]
    i, j = np.meshgrid(np.arange(z_nodes.shape[0] - 1), np.arange(n_s - 1), indexing="ij")
    i, j = i.ravel(), j.ravel()
    a = i * n_s + j
    b = (i + 1) * n_s + j
    c = (i + 1) * n_s + j + 1
    d = i * n_s + j + 1
    tris = np.vstack([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    return _Block(points=points, triangles=tris.astype(np.int64), region=region)


def _glue(blocks: list[_Block]) -> tuple[NDArray, NDArray, NDArray, tuple[str, ...]]:
    region_names: list[str] = []
    points, tris, codes = [], [], []
    offset = 0
    for block in blocks:
        if block.region not in region_names:
            region_names.append(block.region)
        points.append(block.points)
        tris.append(block.triangles + offset)
        codes.append(np.full(block.triangles.shape[0], region_names.index(block.region), dtype=np.int64))
        offset += block.points.shape[0]
    all_points = np.vstack(points)
    keys = np.round(all_points, _DEDUP_DECIMALS)
    unique_keys, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    vertices = all_points[first]
    triangles = inverse.reshape(-1)[np.vstack(tris)]
    region_codes = np.concatenate(codes)
    p = vertices[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    keep = area > 1e-14 * max(float(np.max(area)), 1.0)
    return vertices, triangles[keep], region_codes[keep], tuple(region_names)


def _tags(masks: list[tuple[str, NDArray[np.bool_]]]) -> dict[str, NDArray[np.int64]]:
    """Assign each vertex to the first matching tag in priority order."""
    taken = np.zeros(masks[0][1].shape[0], dtype=bool)
    tags: dict[str, NDArray[np.int64]] = {}
    for name, mask in masks:
        hit = mask & ~taken
        tags[name] = np.flatnonzero(hit).astype(np.int64)
        taken |= hit
    return tags


def build_mesh(spec: DumbbellSpec) -> MeridianMesh:
    """
    Conforming graded mesh of the meridian of the truncated dumbbell.

    Left half-disc about the origin, channel rectangle [0, 1] x [0, eps], right
    half-disc about e1. The junction circles (0, eps) and (1, eps) are vertices, and
    the radial nodes on [0, eps] are graded toward both the axis point and the circle.

    Raises:
        ConfigurationError: On a degenerate spec.
    """
    eps = spec.eps
    if not 0.0 < eps < 0.5 or not 0.0 < spec.grading_ratio < 1.0:
        raise ConfigurationError(f"degenerate dumbbell spec: eps={eps}, grading_ratio={spec.grading_ratio}")
    h0 = spec.min_edge
    ratio = spec.grading_ratio
    # graded toward the axis points (origin, e1) and the junction circle
    inner = axial_nodes(eps, h0, ratio, 0.25 * eps)

    def _radii(outer: float) -> NDArray[np.float64]:
        far = outer_nodes(eps, outer, h0, ratio, spec.h_far, spec.far_stretch)
        return np.concatenate([inner, far[1:]])

    z_channel = axial_nodes(spec.tube_length, h0, ratio, spec.corridor_cap_fraction * eps)
    blocks = [
        polar_block(0.0, _radii(spec.R_left), 0.5 * np.pi, np.pi, spec.n_phi, "left"),
        tensor_block(z_channel, inner, "corridor"),
        polar_block(1.0, _radii(spec.R_right), 0.0, 0.5 * np.pi, spec.n_phi, "right"),
    ]
    vertices, triangles, regions, names = _glue(blocks)

    z, s = vertices[:, 0], vertices[:, 1]
    tol = 1e-9
    outer_left = (z <= tol) & (np.abs(np.hypot(z, s) - spec.R_left) < tol * spec.R_left)
    outer_right = (z >= 1.0 - tol) & (np.abs(np.hypot(z - 1.0, s) - spec.R_right) < tol * spec.R_right)
    wall = (
        ((np.abs(z) < tol) & (s >= eps - tol))
        | ((np.abs(s - eps) < tol) & (z > -tol) & (z < 1.0 + tol))
        | ((np.abs(z - 1.0) < tol) & (s >= eps - tol))
    )
    axis = s < tol
    boundary = _tags([("outer_left", outer_left), ("outer_right", outer_right), ("wall", wall), ("axis", axis)])

    mesh = MeridianMesh(
        vertices=vertices,
        triangles=triangles,
        regions=regions,
        region_names=names,
        boundary=boundary,
        dirichlet_tags=("wall", "outer_left", "outer_right"),
        dimension=spec.N,
        kind="dumbbell",
        metadata={"eps": eps, "R_left": spec.R_left, "R_right": spec.R_right, "spec": spec.model_dump()},
    )
    logger.info(
        "dumbbell mesh eps=%.4g: %d vertices, %d triangles", eps, mesh.n_vertices, mesh.n_triangles
    )
    return mesh


def build_model_mesh(
    N: int,
    *,
    tube_length: float = 12.0,
    radius: float = 40.0,
    tube_dz: float = 0.1,
    n_phi: int = 32,
    grading_ratio: float = 0.7,
    h_far: float = 0.5,
    far_stretch: float = 0.15,
) -> MeridianMesh:
    """
    Model domain: unit tube over [-tube_length, 1] glued to D+ cut at |x - e1| = radius.

    Tube axial nodes are uniform (spacing ``tube_dz``, counted from the junction
    x1 = 1), so tube meshes of different lengths agree near the junction. The
    junction disk {x1 = 1, |x'| < 1} is kept as the interior vertex set ``sigma``.
    """
    n_z = int(round((tube_length + 1.0) / tube_dz))
    if n_z < 2:
        raise ConfigurationError(f"tube spacing {tube_dz} too coarse for length {tube_length}")
    z_tube = 1.0 - tube_dz * np.arange(n_z, -1, -1)
    z_tube[0] = -tube_length
    inner = junction_nodes(1.0, 0.5 * tube_dz, grading_ratio, tube_dz)
    far = outer_nodes(1.0, radius, 0.5 * tube_dz, grading_ratio, h_far, far_stretch)
    blocks = [
        tensor_block(z_tube, inner, "tube"),
        polar_block(1.0, np.concatenate([inner, far[1:]]), 0.0, 0.5 * np.pi, n_phi, "right"),
    ]
    vertices, triangles, regions, names = _glue(blocks)

    z, s = vertices[:, 0], vertices[:, 1]
    tol = 1e-9
    outer = (z >= 1.0 - tol) & (np.abs(np.hypot(z - 1.0, s) - radius) < tol * radius)
    far_tube = np.abs(z + tube_length) < tol
    tube_wall = ((np.abs(s - 1.0) < tol) & (z < 1.0 + tol)) | ((np.abs(z - 1.0) < tol) & (s >= 1.0 - tol))
    axis = s < tol
    sigma = (np.abs(z - 1.0) < tol) & (s < 1.0 - tol)
    boundary = _tags([("outer", outer), ("far_tube", far_tube), ("tube_wall", tube_wall), ("axis", axis)])
    boundary["sigma"] = np.flatnonzero(sigma).astype(np.int64)

    mesh = MeridianMesh(
        vertices=vertices,
        triangles=triangles,
        regions=regions,
        region_names=names,
        boundary=boundary,
        dirichlet_tags=("tube_wall", "far_tube", "outer"),
        dimension=N,
        kind="model",
        metadata={"tube_length": tube_length, "radius": radius, "tube_dz": tube_dz},
    )
    logger.info("model mesh L=%.3g R=%.3g: %d vertices", tube_length, radius, mesh.n_vertices)
    return mesh


def build_exterior_mesh(
    N: int,
    *,
    radius: float = 30.0,
    n_phi: int = 32,
    stretch: float = 0.05,
) -> MeridianMesh:
    """Half-annulus {1 < |x| < radius, x1 < 0}; the inner arc ``inner`` stays free."""
    rho = [1.0]
    while rho[-1] * (1.0 + stretch) < radius:
        rho.append(rho[-1] * (1.0 + stretch))
    rho[-1] = radius
    blocks = [polar_block(0.0, np.array(rho), 0.5 * np.pi, np.pi, n_phi, "exterior")]
    vertices, triangles, regions, names = _glue(blocks)
    z, s = vertices[:, 0], vertices[:, 1]
    r = np.hypot(z, s)
    tol = 1e-9
    boundary = _tags(
        [
            ("outer", np.abs(r - radius) < tol * radius),
            ("wall", np.abs(z) < tol),
            ("inner", np.abs(r - 1.0) < tol),
            ("axis", s < tol),
        ]
    )
    return MeridianMesh(
        vertices=vertices,
        triangles=triangles,
        regions=regions,
        region_names=names,
        boundary=boundary,
        dirichlet_tags=("wall", "outer"),
        dimension=N,
        kind="exterior",
        metadata={"radius": radius},
    )


def build_cylinder_mesh(
    N: int,
    *,
    z_start: float,
    z_end: float,
    radius: float = 1.0,
    n_z: int = 40,
    n_s: int = 16,
) -> MeridianMesh:
    """Uniform mesh of the meridian of a finite cylinder, Dirichlet on wall and ends."""
    z_nodes = np.linspace(z_start, z_end, n_z + 1)
    s_nodes = np.linspace(0.0, radius, n_s + 1)
    vertices, triangles, regions, names = _glue([tensor_block(z_nodes, s_nodes, "tube")])
    z, s = vertices[:, 0], vertices[:, 1]
    tol = 1e-9
    boundary = _tags(
        [
            ("ends", (np.abs(z - z_start) < tol) | (np.abs(z - z_end) < tol)),
            ("tube_wall", np.abs(s - radius) < tol),
            ("axis", s < tol),
        ]
    )
    return MeridianMesh(
        vertices=vertices,
        triangles=triangles,
        regions=regions,
        region_names=names,
        boundary=boundary,
        dirichlet_tags=("tube_wall", "ends"),
        dimension=N,
        kind="cylinder",
        metadata={"z_start": z_start, "z_end": z_end, "radius": radius},
    )
