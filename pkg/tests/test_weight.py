import numpy as np
import pytest
from pydantic import ValidationError

from dumbbell_lab.weight.model import Bump, PWeight, validate


def test_default_weight_is_admissible(weight):
    assert validate(weight) == []
    assert len(weight.plus_bumps) == 1
    assert len(weight.minus_bumps) == 1


def test_bump_peak_and_support():
    bump = Bump(center=6.0, radius=1.5, amplitude=30.0)
    z = np.array([6.0, 7.0, 7.5, 8.0])
    s = np.zeros_like(z)
    values = bump.value(z, s)
    assert values[0] == pytest.approx(30.0)
    assert 0.0 < values[1] < 30.0
    assert values[2] == 0.0
    assert values[3] == 0.0


def test_weight_vanishes_near_the_channel(weight):
    z = np.linspace(-2.4, 4.4, 69)
    assert np.all(weight.eval_p(z, np.zeros_like(z)) == 0.0)
    assert np.all(weight.eval_p(np.full(5, 0.75), np.linspace(0.0, 0.9, 5)) == 0.0)


def test_gradient_matches_finite_differences(weight):
    z = np.array([5.3, 6.4, -4.2])
    s = np.array([0.3, 0.8, 0.5])
    gz, gs = weight.grad_p(z, s)
    h = 1e-6
    fd_z = (weight.eval_p(z + h, s) - weight.eval_p(z - h, s)) / (2 * h)
    fd_s = (weight.eval_p(z, s + h) - weight.eval_p(z, s - h)) / (2 * h)
    np.testing.assert_allclose(gz, fd_z, rtol=1e-5, atol=1e-8)
    np.testing.assert_allclose(gs, fd_s, rtol=1e-5, atol=1e-8)
    np.testing.assert_allclose(weight.radial_term(z, s), z * gz + s * gs)
    np.testing.assert_allclose(weight.axial_term(z, s), gz)


@pytest.mark.parametrize(
    "bump, fragment",
    [
        (Bump(center=0.8, radius=0.2, amplitude=1.0), "strip"),
        (Bump(center=3.0, radius=0.5, amplitude=1.0), "B_3"),
        (Bump(center=-0.5, radius=1.0, amplitude=1.0), "D- support"),
        (Bump(center=6.0, radius=1.5, amplitude=-1.0), "amplitude"),
    ],
)
def test_validate_reports_violations(bump, fragment):
    violations = validate(PWeight(bumps=(Bump(center=6.0, radius=1.5, amplitude=30.0), bump)))
    assert any(fragment in v for v in violations)


def test_weight_without_plus_bump_is_rejected():
    violations = validate(PWeight(bumps=(Bump(center=-4.0, radius=1.5, amplitude=10.0),)))
    assert any("D+" in v for v in violations)
    assert validate(PWeight()) != []


def test_bump_is_frozen_and_strict():
    with pytest.raises(ValidationError):
        Bump(center=1.0, radius=-1.0, amplitude=1.0)
    with pytest.raises(ValidationError):
        Bump(center=1.0, radius=1.0, amplitude=1.0, width=2.0)
