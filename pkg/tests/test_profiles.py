import numpy as np
import pytest

from dumbbell_lab.cross_section.radial import solve_cross_section
from dumbbell_lab.errors import ConfigurationError, DomainError
from dumbbell_lab.fem.assembly import stiffness
from dumbbell_lab.fem.fields import DiscreteField
from dumbbell_lab.geometry.builder import build_cylinder_mesh
from dumbbell_lab.profiles import (
    check_envelopes,
    compute_phi1,
    compute_phi2,
    compute_profiles,
    dipole_field,
    eval_f,
    eval_h,
    kelvin,
    kelvin_energy_identity,
    lower_envelope,
    tube_mode,
    upper_envelope,
)
from dumbbell_lab.profiles.junction import harmonic_residual


@pytest.fixture(scope="module")
def pair(tiny_model_mesh):
    return compute_profiles(tiny_model_mesh)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_kelvin_transform_of_the_dipole_is_x1(N):
    v = kelvin(dipole_field(N))
    z = np.array([-0.5, -0.1, 0.3, 2.0])
    s = np.array([0.2, 0.7, 0.1, 1.5])
    np.testing.assert_allclose(v.value(z, s), z, rtol=1e-12)
    gz, gs = v.grad(z, s)
    np.testing.assert_allclose(gz, 1.0, rtol=1e-10)
    np.testing.assert_allclose(gs, 0.0, atol=1e-10)


def test_kelvin_transform_is_undefined_at_its_center():
    with pytest.raises(DomainError):
        kelvin(dipole_field(3), center=0.5).value(np.array([0.5]), np.array([0.0]))


def test_kelvin_energy_identity():
    identity = kelvin_energy_identity(3)
    assert identity.exact == pytest.approx(4.0 * np.pi / 3.0, rel=1e-12)
    assert identity.lhs == pytest.approx(identity.exact, rel=1e-9)
    assert identity.rhs == pytest.approx(identity.exact, rel=1e-9)
    assert identity.residual < 1e-9


def test_dipole_gradient_matches_finite_differences():
    v = dipole_field(4, beta=-0.7, center=1.0)
    z, s, h = np.array([-1.3]), np.array([0.8]), 1e-6
    gz, gs = v.grad(z, s)
    assert gz[0] == pytest.approx((v.value(z + h, s) - v.value(z - h, s))[0] / (2 * h), rel=1e-6)
    assert gs[0] == pytest.approx((v.value(z, s + h) - v.value(z, s - h))[0] / (2 * h), rel=1e-6)


def test_tube_mode_solves_the_discrete_tube_equations(tiny_model_mesh):
    mode = tube_mode(tiny_model_mesh)
    assert mode.rate > 1.0
    assert mode.kappa == pytest.approx(solve_cross_section(3).sqrt_lambda1, rel=0.15)
    mesh = tiny_model_mesh
    F = np.where(mesh.s <= 1.0 + 1e-9, mode.value(mesh.z, mesh.s), 0.0)
    K = stiffness(mesh)
    rows = np.zeros(mesh.n_vertices, dtype=bool)
    rows[K.free] = True
    rows &= (mesh.z > -6.0 + 2.5 * mode.dz) & (mesh.z < 1.0 - 1.5 * mode.dz)
    r = (K.matrix @ F)[rows]
    scale = (abs(K.matrix) @ np.abs(F))[rows]
    assert np.max(np.abs(r) / scale) < 1e-10


def test_phi1_is_discrete_harmonic_with_the_far_ramp(pair):
    phi1 = pair.phi1
    assert harmonic_residual(phi1.mesh, phi1.field.values) < 1e-10
    far = phi1(np.array([60.0, 1.0]), np.array([0.0, 40.0]))
    np.testing.assert_allclose(far, [59.0, 0.0])
    assert phi1(np.array([-10.0]), np.array([0.0]))[0] == 0.0
    # the junction flux lifts Phi_1 above zero inside the tube
    assert phi1(np.array([0.0]), np.array([0.0]))[0] > 0.0


def test_phi2_continues_with_the_tube_mode(pair):
    phi2 = pair.phi2
    z = np.array([-20.0])
    s = np.array([0.3])
    assert phi2(z, s)[0] == pytest.approx(pair.mode.value(z, s)[0])
    assert phi2(np.array([60.0]), np.array([0.0]))[0] == 0.0
    assert pair.metadata["kappa_h"] == pair.mode.kappa


@pytest.mark.parametrize("builder", [compute_phi1, compute_phi2, tube_mode])
def test_profiles_need_a_model_mesh(builder):
    with pytest.raises(ConfigurationError):
        builder(build_cylinder_mesh(3, z_start=-2.0, z_end=1.0, n_z=4, n_s=2))


def test_envelopes_reduce_to_the_ramp_far_out(pair):
    # both blow-ups leave the model mesh: Phi_1 continues as x1 - 1 and Phi_2 as zero
    z, s = np.array([13.0]), np.array([0.0])
    assert upper_envelope(pair, 0.2, z, s)[0] == pytest.approx(12.0)
    assert lower_envelope(pair, 0.2, z, s)[0] == pytest.approx(12.0)


def test_envelope_check_rejects_a_mismatched_eps(tiny_mesh, pair):
    field = DiscreteField(mesh=tiny_mesh, values=np.zeros(tiny_mesh.n_vertices))
    with pytest.raises(ConfigurationError):
        check_envelopes(field, pair, eps=0.1)


def test_envelope_check_on_the_ground_state(tiny_mesh, tiny_problem, pair):
    from dumbbell_lab.eigen import sign_normalize, solve_weighted

    u = sign_normalize(solve_weighted(tiny_mesh, tiny_problem.weight, k=1, problem=tiny_problem).ground)
    report = check_envelopes(u, pair, eps=0.2)
    assert report.n_points > 0
    assert np.isfinite(report.c3) and report.c3 > 0.0
    assert report.sup_abs == pytest.approx(u.max_abs())
    assert set(report.as_dict()) >= {"eps", "c3", "c5", "usot_constant", "usot_holds"}


def test_tube_fields_f_and_h():
    cross = solve_cross_section(3, 1000)
    s = np.array([0.0, 0.4, 0.9, 1.5])
    k = cross.sqrt_lambda1
    np.testing.assert_allclose(eval_f(np.ones(4), s, cross), cross.psi1(s), rtol=1e-12)
    np.testing.assert_allclose(eval_f(np.full(4, -1.0), s, cross), np.exp(2.0 * k) * cross.psi1(s), rtol=1e-12)
    assert eval_f(np.array([0.0]), np.array([1.5]), cross)[0] == 0.0
    z = np.array([-0.5, 0.25, 1.0, 3.0])
    np.testing.assert_allclose(eval_h(z, s, cross), eval_f(1.0 - z, s, cross), rtol=1e-12)
