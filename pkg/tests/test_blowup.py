import numpy as np
import pytest

from dumbbell_lab.blowup import (
    RescaleKind,
    beta_from_fit,
    beta_from_formula,
    compare_blowup_to_profile,
    fit_power,
    h_u,
    h_u_growth_bounds,
    hat_growth_bound,
    left_hat,
    mu,
    mu_expansion_check,
    nodal_sign_scan,
    rescale,
    right_tilde,
    u_lambda,
    u_normalized,
)
from dumbbell_lab.cross_section.angular import angular_profile
from dumbbell_lab.cross_section.radial import solve_cross_section
from dumbbell_lab.eigen import sign_normalize, solve_weighted
from dumbbell_lab.errors import DomainError, FitError
from dumbbell_lab.fem.fields import DiscreteField, linear_field
from dumbbell_lab.fem.integrals import surface_integral
from dumbbell_lab.geometry.builder import build_cylinder_mesh
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.profiles import dipole_field
from dumbbell_lab.weight.model import Bump, PWeight

LAMBDAS = [0.05, 0.08, 0.12, 0.16, 0.2]


@pytest.fixture(scope="module")
def ground(tiny_mesh, tiny_problem):
    return sign_normalize(solve_weighted(tiny_mesh, tiny_problem.weight, k=1, problem=tiny_problem).ground)


def test_fit_power_recovers_an_exact_power_law():
    lam = np.array(LAMBDAS)
    fit = fit_power(lam, 3.0 * lam**-4)
    assert fit.exponent == pytest.approx(-4.0, abs=1e-10)
    assert fit.coefficient == pytest.approx(3.0, rel=1e-10)
    assert fit.rms < 1e-12
    assert fit.window == (0.05, 0.2)


@pytest.mark.parametrize(
    "lambdas, values",
    [([0.1], [1.0]), ([0.1, 0.2], [1.0]), ([0.1, 0.2], [1.0, -1.0]), ([0.1, 0.1], [1.0, 2.0]), ([0.0, 0.2], [1.0, 1.0])],
)
def test_fit_power_rejects_bad_samples(lambdas, values):
    with pytest.raises(FitError):
        fit_power(lambdas, values)


@pytest.mark.parametrize("N", [3, 4])
def test_trace_asymptotics_of_a_dipole(N):
    beta = -0.7
    U = dipole_field(N, beta=beta)
    upsilon = angular_profile(N).upsilon
    lam = np.array(LAMBDAS)
    np.testing.assert_allclose(lam ** (2 * (N - 1)) * h_u(U, lam), beta**2 * upsilon**2, rtol=1e-10)
    np.testing.assert_allclose(lam ** (N - 1) * mu(U, lam), -beta * upsilon, rtol=1e-10)


@pytest.mark.parametrize("N", [3, 4])
def test_beta_from_fit_recovers_the_dipole_coefficient(N):
    estimate = beta_from_fit(dipole_field(N, beta=-0.7), LAMBDAS)
    assert estimate.beta == pytest.approx(-0.7, rel=1e-8)
    assert estimate.beta_mu == pytest.approx(-0.7, rel=1e-8)
    assert estimate.trace_sign == 1.0
    assert estimate.exponent.exponent == pytest.approx(-2.0 * (N - 1), abs=1e-8)


def test_h_u_growth_bounds_hold_for_a_dipole():
    U = dipole_field(3, beta=-0.7)
    H = h_u(U, LAMBDAS)
    bounds = h_u_growth_bounds(U, LAMBDAS, H, k_tilde=0.25, delta=0.5)
    assert bounds.upper_ratio == pytest.approx(np.exp(-2.0 * 0.5 * 2.5 * 0.25), rel=1e-9)
    assert bounds.lower_ratio == pytest.approx((0.2 / 0.16) ** 1.0, rel=1e-9)
    assert bounds.lambda_rho == 0.2
    assert bounds.holds


def test_h_u_growth_bounds_need_samples_below_k_tilde():
    U = dipole_field(3)
    with pytest.raises(DomainError):
        h_u_growth_bounds(U, [0.1, 0.3], [1.0, 1.0], k_tilde=0.25, delta=0.5)
    with pytest.raises(FitError):
        h_u_growth_bounds(U, [0.1], [1.0], k_tilde=0.25, delta=0.5)


def test_beta_fit_rejects_lambdas_outside_the_window():
    with pytest.raises(DomainError):
        beta_from_fit(dipole_field(3), [0.1, 0.5], window=(0.05, 0.2))


def test_beta_from_formula_without_left_bumps():
    weight = PWeight(bumps=(Bump(center=6.0, radius=1.5, amplitude=30.0),))
    formula = beta_from_formula(dipole_field(3, beta=-0.7), weight, lambda_k0=5.0)
    assert formula.volume == 0.0
    assert formula.beta == pytest.approx(-0.7, rel=1e-10)
    assert formula.bracket == pytest.approx(0.7 * angular_profile(3).upsilon, rel=1e-10)


def test_mu_expansion_of_a_dipole_has_no_deviation():
    weight = PWeight(bumps=(Bump(center=6.0, radius=1.5, amplitude=30.0),))
    expansion = mu_expansion_check(dipole_field(3, beta=-0.7), weight, 5.0, LAMBDAS)
    assert expansion.bracket == pytest.approx(0.7 * angular_profile(3).upsilon, rel=1e-10)
    assert expansion.lambdas == tuple(LAMBDAS)
    assert expansion.max_deviation < 1e-9


def test_beta_from_formula_needs_a_mesh_for_left_bumps(weight):
    with pytest.raises(DomainError):
        beta_from_formula(dipole_field(3), weight, lambda_k0=5.0)


def test_u_lambda_has_unit_trace():
    U = dipole_field(3, beta=-0.7)
    scaled = u_lambda(U, 0.1)
    assert scaled.kind is RescaleKind.U_LAMBDA
    assert scaled.name == "U_lambda(0.1)"
    trace = surface_integral(scaled, curve(None, "half_sphere_left", 1.0, 48, N=3))
    assert trace == pytest.approx(1.0, rel=1e-10)
    with pytest.raises(DomainError):
        u_lambda(U, 0.0)


def test_right_tilde_is_the_blow_up_about_e1(ground):
    tilde = right_tilde(ground)
    z, s = np.array([2.0, 3.0]), np.array([0.5, 1.0])
    expected = ground.evaluate(1.0 + 0.2 * (z - 1.0), 0.2 * s).u / 0.2
    np.testing.assert_allclose(tilde(z, s), expected)


def test_left_hat_has_unit_trace_on_the_first_slice(ground):
    hat = left_hat(ground)
    trace = surface_integral(hat, curve(None, "slice", 1.0, 48, N=3, eps=1.0))
    assert trace == pytest.approx(1.0, rel=1e-8)


def test_u_normalized_and_dispatch(ground):
    U = u_normalized(ground, k_tilde=0.25)
    assert U.mesh is ground.mesh
    trace = surface_integral(U, curve(ground.mesh, "half_sphere_left", 0.25, 48))
    assert trace == pytest.approx(1.0, rel=1e-10)
    assert rescale(ground, "right_tilde").kind is RescaleKind.RIGHT_TILDE
    assert rescale(ground, RescaleKind.U_LAMBDA, lam=0.5, k_tilde=0.25).lam == 0.5
    with pytest.raises(DomainError):
        u_normalized(ground, k_tilde=0.1)
    with pytest.raises(ValueError):
        rescale(ground, "sideways")


def test_rescalings_need_a_dumbbell_field():
    mesh = build_cylinder_mesh(3, z_start=-2.0, z_end=1.0, n_z=4, n_s=2)
    with pytest.raises(DomainError):
        right_tilde(DiscreteField(mesh=mesh, values=mesh.z.copy()))


def test_comparison_recovers_the_multiple():
    comparison = compare_blowup_to_profile(linear_field(3, slope=2.5), linear_field(3), junction=1.0)
    assert comparison.constant == pytest.approx(2.5)
    assert comparison.residual < 1e-12
    left = compare_blowup_to_profile(linear_field(3, slope=-1.0, offset=1.0), linear_field(3, offset=1.0), junction=0.0)
    assert left.constant == pytest.approx(-1.0)


def test_comparison_errors():
    with pytest.raises(DomainError):
        compare_blowup_to_profile(linear_field(3), linear_field(3), junction=0.5)
    with pytest.raises(DomainError):
        compare_blowup_to_profile(linear_field(3), linear_field(3, slope=0.0))


def test_nodal_sign_scan(ground):
    samples = nodal_sign_scan(ground, [1.0, 2.0], side="left")
    assert [x.radius for x in samples] == [1.0, 2.0]
    assert all(x.side == "left" for x in samples)
    with pytest.raises(DomainError):
        nodal_sign_scan(ground, [1.0], side="up")


def test_hat_growth_bound(ground):
    cross = solve_cross_section(3)
    samples = hat_growth_bound(ground, cross, radii=(2.0, 3.0))
    assert [x.R for x in samples] == [2.0, 3.0]
    assert all(x.trace > 0.0 for x in samples)
    with pytest.raises(DomainError):
        hat_growth_bound(ground, cross, radii=(6.0,))
