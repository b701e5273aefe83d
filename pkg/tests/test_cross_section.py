import math

import numpy as np
import pytest

from dumbbell_lab.cross_section import angular_profile, bessel_oracle, solve_cross_section, y1_eigenvalue_check
from dumbbell_lab.cross_section.radial import raw_eigenvalue
from dumbbell_lab.errors import ConfigurationError


def test_bessel_oracle_known_zeros():
    assert bessel_oracle(3) == pytest.approx(2.404825557695773**2, rel=1e-12)
    assert bessel_oracle(4) == pytest.approx(math.pi**2, rel=1e-12)
    assert bessel_oracle(5) == pytest.approx(3.8317059702075125**2, rel=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_radial_solve_matches_oracle(N):
    spectrum = solve_cross_section(N, 1000)
    assert spectrum.lambda1 == pytest.approx(bessel_oracle(N), rel=1e-4)
    assert spectrum.sqrt_lambda1 == pytest.approx(math.sqrt(spectrum.lambda1))


def test_richardson_improves_on_raw_value():
    exact = bessel_oracle(3)
    spectrum = solve_cross_section(3, 200)
    assert abs(spectrum.lambda1 - exact) < abs(raw_eigenvalue(3, 200) - exact)


def test_profile_is_positive_and_normalized():
    spectrum = solve_cross_section(3, 1000)
    assert spectrum.norm_squared() == pytest.approx(1.0, rel=1e-10)
    assert np.all(spectrum.values[:-1] > 0.0)
    assert spectrum.values[-1] == 0.0
    assert spectrum.psi1(1.5) == 0.0
    # symmetric in s
    assert spectrum.psi1(-0.3) == pytest.approx(spectrum.psi1(0.3))


def test_cross_section_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        solve_cross_section(2)
    with pytest.raises(ConfigurationError):
        solve_cross_section(3, 8)
    with pytest.raises(ConfigurationError):
        bessel_oracle(2)


def test_upsilon_closed_form_n3():
    assert angular_profile(3).upsilon == pytest.approx(math.sqrt(2.0 * math.pi / 3.0), abs=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_y1_is_the_first_half_sphere_mode(N):
    assert y1_eigenvalue_check(N) == pytest.approx(N - 1, abs=1e-8)


def test_y1_is_positive_on_the_lower_half_sphere():
    profile = angular_profile(3)
    assert profile.y1(-1.0) > 0.0
    assert profile.y1_at(np.array([-0.5]), np.array([0.5]))[0] == pytest.approx(math.sqrt(0.5) / profile.upsilon)
