"""Junction profiles, Kelvin transforms and envelope checks."""

from dumbbell_lab.profiles.envelopes import EnvelopeReport, check_envelopes, lower_envelope, upper_envelope
from dumbbell_lab.profiles.junction import (
    ExtendedProfile,
    ProfilePair,
    TubeMode,
    compute_phi1,
    compute_phi2,
    compute_profiles,
    eval_f,
    eval_h,
    tube_mode,
)
from dumbbell_lab.profiles.kelvin import dipole_field, kelvin, kelvin_energy_identity

__all__ = [
    "EnvelopeReport",
    "ExtendedProfile",
    "ProfilePair",
    "TubeMode",
    "check_envelopes",
    "compute_phi1",
    "compute_phi2",
    "compute_profiles",
    "dipole_field",
    "eval_f",
    "eval_h",
    "kelvin",
    "kelvin_energy_identity",
    "lower_envelope",
    "tube_mode",
    "upper_envelope",
]
