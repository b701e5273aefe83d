import numpy as np
import pytest

from dumbbell_lab.eigen import (
    dense_weighted_eigenvalues,
    limit_spectra,
    resolve_left_tail,
    sign_normalize,
    solve_weighted,
    track_branch,
)
from dumbbell_lab.eigen.dense import DENSE_LIMIT
from dumbbell_lab.errors import AssumptionViolation, ConfigurationError, SolverError
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.geometry.builder import build_cylinder_mesh
from dumbbell_lab.weight.model import Bump, PWeight


@pytest.fixture(scope="module")
def tiny_result(tiny_mesh, tiny_problem):
    return solve_weighted(tiny_mesh, tiny_problem.weight, k=3, problem=tiny_problem)


def test_eigenpairs_satisfy_the_discrete_equation(tiny_result, tiny_problem):
    assert np.all(np.diff(tiny_result.eigenvalues) > 0.0)
    assert tiny_result.residuals.max() < 1e-8
    K, M = tiny_problem.K, tiny_problem.M
    for lam, field in zip(tiny_result.eigenvalues, tiny_result.eigenfields):
        u = field.values
        r = (K @ u - lam * (M @ u))[tiny_problem.free]
        assert np.linalg.norm(r) < 1e-6 * np.linalg.norm((K @ u)[tiny_problem.free])
        assert tiny_problem.m_inner(u, u) == pytest.approx(1.0, rel=1e-10)
        assert np.all(u[field.mesh.dirichlet_mask] == 0.0)


def test_sparse_solve_matches_dense_oracle(tiny_mesh, tiny_problem, tiny_result):
    assert tiny_problem.free.shape[0] <= DENSE_LIMIT
    dense = dense_weighted_eigenvalues(tiny_mesh, tiny_problem.weight, k=3)
    np.testing.assert_allclose(tiny_result.eigenvalues, dense, rtol=1e-8)


def test_eigenfields_are_m_orthogonal(tiny_result, tiny_problem):
    a, b = tiny_result.eigenfields[:2]
    assert abs(tiny_problem.m_inner(a.values, b.values)) < 1e-8


def test_limit_spectra_gap(tiny_spec, tiny_mesh, tiny_problem, tiny_result):
    limits = limit_spectra(tiny_spec, tiny_problem.weight, k=2, mesh=tiny_mesh, problem=tiny_problem)
    assert limits.gap >= 0.2
    assert limits.minus is not None
    # D+ with the channel clamped is a subproblem of the dumbbell
    assert tiny_result.eigenvalues[0] <= limits.lambda_k0 * (1.0 + 1e-8)
    plus_field = limits.plus.ground
    assert np.all(plus_field.values[tiny_mesh.z < 1.0 - 1e-9] == 0.0)


def test_limit_spectra_rejects_a_small_gap(tiny_spec, tiny_mesh, tiny_problem):
    with pytest.raises(AssumptionViolation):
        limit_spectra(tiny_spec, tiny_problem.weight, k=2, mesh=tiny_mesh, gap_threshold=100.0, problem=tiny_problem)


def test_weight_vanishing_on_the_free_set_is_a_configuration_error():
    mesh = build_cylinder_mesh(3, z_start=-1.0, z_end=1.0, n_z=8, n_s=4)
    far_away = PWeight(bumps=(Bump(center=20.0, radius=1.0, amplitude=1.0),))
    with pytest.raises(ConfigurationError):
        solve_weighted(mesh, far_away, k=1, domain="cylinder")


def test_too_many_eigenpairs_requested():
    mesh = build_cylinder_mesh(3, z_start=-1.0, z_end=1.0, n_z=3, n_s=2)
    weight = PWeight(bumps=(Bump(center=0.0, radius=2.0, amplitude=1.0),))
    with pytest.raises(SolverError):
        solve_weighted(mesh, weight, k=10)


def test_sign_normalize_is_idempotent_and_fixes_the_sign(tiny_result):
    field = sign_normalize(tiny_result.ground)
    again = sign_normalize(field.scaled(-1.0))
    np.testing.assert_allclose(again.values, field.values)
    node_gradient = field.nodal_gradients
    axis = field.mesh.tagged("axis")
    right = axis[field.mesh.z[axis] > 1.0 + 1e-12]
    node = right[np.argmin(field.mesh.z[right])]
    assert node_gradient[node, 0] > 0.0


def test_sign_normalize_rejects_a_flat_field(tiny_mesh):
    with pytest.raises(AssumptionViolation):
        sign_normalize(DiscreteField(mesh=tiny_mesh, values=np.zeros(tiny_mesh.n_vertices)))


def test_track_branch_follows_the_overlap(tiny_result, tiny_problem):
    assert track_branch(tiny_result, tiny_problem, tiny_result.eigenfields[1]) == 1
    assert track_branch(tiny_result, tiny_problem, tiny_result.eigenfields[0].scaled(-2.0)) == 0
    assert track_branch(tiny_result, tiny_problem, None) == 0
    assert track_branch(tiny_result, tiny_problem, None, reference=tiny_result.eigenvalues[2] + 1e-6) == 2


def test_left_tail_march_keeps_the_trusted_part(tiny_result, tiny_problem):
    field = sign_normalize(tiny_result.ground)
    lam = float(tiny_result.eigenvalues[0])
    marched = resolve_left_tail(field, lam, tiny_problem.weight, trust_ratio=1e-6, problem=tiny_problem)
    mesh = field.mesh
    assert marched.tail_resolved
    assert marched.meta["march_stages"] >= 1
    right = mesh.z > 1.0 - 1e-9
    np.testing.assert_array_equal(marched.values[right], field.values[right])
    # the coupled field already satisfies the equation left of the channel, so marching reproduces it
    np.testing.assert_allclose(marched.values, field.values, rtol=0.0, atol=1e-6 * field.max_abs())


def test_left_tail_march_needs_a_dumbbell_mesh():
    mesh = build_cylinder_mesh(3, z_start=-1.0, z_end=1.0, n_z=4, n_s=2)
    field = DiscreteField(mesh=mesh, values=np.zeros(mesh.n_vertices))
    with pytest.raises(ConfigurationError):
        resolve_left_tail(field, 1.0, PWeight.default())
