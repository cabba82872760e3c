"""Inverse-scattering laboratory for the good Boussinesq equation."""

from .errors import (
    AssumptionError,
    BoussinesqError,
    NumericalError,
    ValidationError,
)
from .profiles import Profile, effective_support, gaussian_profile, make_profile

__all__ = [
    "AssumptionError",
    "BoussinesqError",
    "NumericalError",
    "Profile",
    "ValidationError",
    "effective_support",
    "gaussian_profile",
    "make_profile",
]
