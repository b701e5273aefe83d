"""
Left-tail marching.

An eigenvector from a Krylov solver carries absolute precision of about
1e-16 * max|u|. Across the channel the eigenfield decays by several orders of
magnitude per channel radius, so its values in D- are pure round-off. The
tail is recomputed by a sequence of Dirichlet solves of (K - lambda M) w = 0
on {x1 < z_c}, each with the data on the cut rescaled to O(1). Every solve
only spans ``stage_length`` channel radii of decay, so the recomputed field
keeps relative precision down to the far end of D-.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from dumbbell_lab.eigen.solver import EigenProblem
from dumbbell_lab.errors import ConfigurationError, SolverError
from dumbbell_lab.fem.assembly import solve_dirichlet
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.utils.logging import get_logger
from dumbbell_lab.weight.model import PWeight

logger = get_logger(__name__)

_LEVEL_DECIMALS = 12


def _corridor_levels(field: DiscreteField) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Distinct x1 levels of the channel vertices and the max |u| on each."""
    mesh = field.mesh
    idx = mesh.region_vertices("corridor")
    keys = np.round(mesh.z[idx], _LEVEL_DECIMALS)
    levels, inverse = np.unique(keys, return_inverse=True)
    amp = np.zeros(levels.shape[0])
    np.maximum.at(amp, inverse, np.abs(field.values[idx]))
    return levels, amp


def resolve_left_tail(
    field: DiscreteField,
    eigenvalue: float,
    weight: PWeight,
    *,
    trust_ratio: float = 1e-6,
    stage_length: float = 4.0,
    problem: EigenProblem | None = None,
) -> DiscreteField:
    """
    Recompute ``field`` left of its last trusted channel level.

    Args:
        field: Eigenfield on a dumbbell mesh.
        eigenvalue: Its eigenvalue.
        weight: The weight p the field was computed with.
        trust_ratio: Channel levels with max|u| >= trust_ratio * max|u| are kept.
        stage_length: Stage width in units of eps.
        problem: Assembled matrices to reuse.

    Raises:
        ConfigurationError: If the mesh is not a dumbbell mesh.
        SolverError: If no channel level is trusted or a stage solve fails.
    """
    mesh = field.mesh
    if mesh.kind != "dumbbell":
        raise ConfigurationError(f"left-tail marching needs a dumbbell mesh, got {mesh.kind!r}")
    if stage_length <= 0 or not 0 < trust_ratio < 1:
        raise ConfigurationError(f"invalid marching parameters stage={stage_length} trust={trust_ratio}")
    eps = float(mesh.metadata["eps"])
    problem = problem or EigenProblem.assemble(mesh, weight)
    A = (problem.K - eigenvalue * problem.M).tocsr()

    levels, amp = _corridor_levels(field)
    trusted = levels[amp >= trust_ratio * field.max_abs()]
    if trusted.size == 0:
        raise SolverError("no trusted channel level to march from")
    z = mesh.z
    tol = 1e-9 * eps
    step = stage_length * eps
    u = field.values.copy()
    dirichlet = mesh.dirichlet_mask
    z_cut = float(trusted.min())
    stages = 0
    while True:
        final = z_cut <= step + tol
        unknown = (z < z_cut - tol) & ~dirichlet
        cut = np.abs(z - z_cut) <= tol
        scale = float(np.max(np.abs(u[cut]))) if cut.any() else 0.0
        if scale == 0.0 or not np.isfinite(scale):
            raise SolverError(f"vanishing data on the cut x1={z_cut:.6g}")
        data = np.where(cut, u / scale, 0.0)
        solution = solve_dirichlet(A, np.flatnonzero(unknown), np.zeros(mesh.n_vertices), data)
        accept = unknown if final else unknown & (z >= z_cut - step - tol)
        u[accept] = scale * solution[accept]
        stages += 1
        if final:
            break
        below = levels[levels < z_cut - step + tol]
        z_cut = float(below.max()) if below.size else 0.0
    logger.info("marched left tail in %d stage(s) from x1=%.4g (eps=%.4g)", stages, float(trusted.min()), eps)
    return DiscreteField(
        mesh=mesh,
        values=u,
        name=field.name,
        tail_resolved=True,
        meta={**field.meta, "march_stages": stages},
    )
