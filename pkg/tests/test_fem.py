import numpy as np
import pytest

from dumbbell_lab.errors import ConfigurationError
from dumbbell_lab.fem.assembly import solve_dirichlet, stiffness, weighted_mass
from dumbbell_lab.fem.fields import DiscreteField, ReflectedField, linear_field
from dumbbell_lab.fem.integrals import grad_sq, region_integral, surface_integral, u_sq, u_value
from dumbbell_lab.geometry.builder import build_cylinder_mesh
from dumbbell_lab.geometry.curves import curve
from dumbbell_lab.geometry.regions import everywhere, tube_below


@pytest.fixture(scope="module")
def cylinder():
    return build_cylinder_mesh(3, z_start=-2.0, z_end=1.0, n_z=12, n_s=6)


def _ones(z, s):
    return np.ones_like(z)


@pytest.mark.parametrize("N, volume", [(3, 3.0 * np.pi), (4, 4.0 * np.pi)])
def test_mass_and_stiffness_are_exact_for_linear_data(N, volume):
    mesh = build_cylinder_mesh(N, z_start=-2.0, z_end=1.0, n_z=6, n_s=5)
    M = weighted_mass(mesh, _ones)
    K = stiffness(mesh)
    ones = np.ones(mesh.n_vertices)
    assert M.quadratic_form(ones) == pytest.approx(volume, rel=1e-12)
    assert K.quadratic_form(mesh.z) == pytest.approx(volume, rel=1e-12)
    np.testing.assert_allclose(K.matrix @ ones, 0.0, atol=1e-12)
    assert K.symmetry_defect() < 1e-14
    assert M.symmetry_defect() < 1e-14


def test_negative_weight_is_rejected(cylinder):
    with pytest.raises(ConfigurationError):
        weighted_mass(cylinder, lambda z, s: -np.ones_like(z))


def test_region_mask_restricts_assembly(tiny_mesh):
    full = weighted_mass(tiny_mesh, _ones)
    left = weighted_mass(tiny_mesh, _ones, regions=("left",))
    rest = weighted_mass(tiny_mesh, _ones, regions=("corridor", "right"))
    np.testing.assert_allclose((left.matrix + rest.matrix - full.matrix).toarray(), 0.0, atol=1e-12)


def test_dirichlet_solve_reproduces_axial_harmonic(cylinder):
    K = stiffness(cylinder)
    u = solve_dirichlet(K.matrix, K.free, np.zeros(cylinder.n_vertices), cylinder.z.copy())
    np.testing.assert_allclose(u, cylinder.z, atol=1e-10)


def test_p1_field_is_exact_on_linear_functions(cylinder):
    field = DiscreteField.from_function(cylinder, lambda z, s: 2.0 * z - 3.0 * s)
    z = np.array([-1.7, 0.1, 0.9])
    s = np.array([0.2, 0.55, 0.95])
    sample = field.evaluate(z, s)
    np.testing.assert_allclose(sample.u, 2.0 * z - 3.0 * s, atol=1e-12)
    np.testing.assert_allclose(sample.gz, 2.0, atol=1e-10)
    np.testing.assert_allclose(sample.gs, -3.0, atol=1e-10)
    outside = field.evaluate(np.array([5.0]), np.array([0.5]))
    assert np.isnan(outside.u[0])


def test_discrete_field_shape_is_checked(cylinder):
    with pytest.raises(ValueError):
        DiscreteField(mesh=cylinder, values=np.zeros(3))


def test_reflected_field_flips_axial_gradient():
    base = linear_field(3, slope=2.0)
    reflected = ReflectedField(base)
    sample = reflected.evaluate(np.array([0.25]), np.array([0.1]))
    assert sample.u[0] == pytest.approx(1.5)
    assert sample.gz[0] == pytest.approx(-2.0)


def test_volume_and_surface_integrals(cylinder):
    field = linear_field(3)
    volume = region_integral(field, everywhere(), u_value, mesh=cylinder)
    # int z over the cylinder [-2, 1] x B_1
    assert volume == pytest.approx(np.pi * (0.5 - 2.0), rel=1e-10)
    below = region_integral(field, tube_below(0.0), grad_sq, mesh=cylinder)
    assert below == pytest.approx(2.0 * np.pi, rel=1e-10)
    # cut through the middle of a cell: resolved to subtriangles only
    cut = region_integral(field, tube_below(0.1), grad_sq, mesh=cylinder)
    assert 2.0 * np.pi < cut < 2.25 * np.pi
    trace = surface_integral(field, curve(cylinder, "slice", 0.5, 16), u_sq)
    assert trace == pytest.approx(0.25 * np.pi, rel=1e-12)
