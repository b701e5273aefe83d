"""Spectral data of the channel cross-section and of the half-sphere."""

from dumbbell_lab.cross_section.angular import AngularProfile, angular_profile, y1_eigenvalue_check
from dumbbell_lab.cross_section.radial import CrossSectionSpectrum, bessel_oracle, solve_cross_section

__all__ = [
    "AngularProfile",
    "CrossSectionSpectrum",
    "angular_profile",
    "bessel_oracle",
    "solve_cross_section",
    "y1_eigenvalue_check",
]
