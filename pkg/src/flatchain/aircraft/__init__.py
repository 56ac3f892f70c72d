from .params import AircraftParams, AircraftState, Controls, ForceTorque, rho_at
from .aero import (
    AeroCoefficients,
    DomainError,
    dynamics,
    envelope_violations,
    forces_and_torques,
    gna_coefficients,
)
from .trim import StallResult, TrimError, TrimPoint, stall_analysis, trim_level_flight
from .singular import SingularityDeterminants, singularity_determinants

__all__ = [
    "AircraftParams",
    "AircraftState",
    "Controls",
    "ForceTorque",
    "AeroCoefficients",
    "DomainError",
    "SingularityDeterminants",
    "StallResult",
    "TrimError",
    "TrimPoint",
    "dynamics",
    "envelope_violations",
    "forces_and_torques",
    "gna_coefficients",
    "rho_at",
    "singularity_determinants",
    "stall_analysis",
    "trim_level_flight",
]
