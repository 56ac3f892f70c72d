"""Friendly wrappers over the numeric kernels: coefficient records, forces
and torques, and the 12/9-state dynamics with domain checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import AircraftParams, AircraftState, Controls, ForceTorque

# indices of the 9-state restriction: drop x, y, chi
RESTRICTED_IDX = (2, 3, 4, 6, 7, 8, 9, 10, 11)


class DomainError(ValueError):
    """State outside the model's validity domain (V <= 0, |gamma| or |beta| >= pi/2)."""


@dataclass(frozen=True)
class AeroCoefficients:
    C_D: float
    C_Y: float
    C_L: float
    C_l: float
    C_m: float
    C_n: float


def gna_coefficients(
    params: AircraftParams,
    alpha: float,
    beta: float,
    p: float,
    q: float,
    r: float,
    V: float,
    controls: Controls,
    simplified: bool = False,
) -> AeroCoefficients:
    """All six polynomial aerodynamic coefficients.

    In simplified mode the rates and surface deflections are zeroed inside
    the force coefficients only; the moment coefficients always see them.
    """
    pk = params.packed
    CD, CY, CL = kernels.force_coeffs(
        pk, V, alpha, beta, p, q, r,
        controls.delta_l, controls.delta_m, controls.delta_n, simplified,
    )
    Cl, Cm, Cn = kernels.moment_coeffs(
        pk, V, alpha, beta, p, q, r,
        controls.delta_l, controls.delta_m, controls.delta_n,
    )
    return AeroCoefficients(CD, CY, CL, Cl, Cm, Cn)


def forces_and_torques(
    params: AircraftParams,
    state: AircraftState,
    controls: Controls,
    simplified: bool = False,
) -> ForceTorque:
    pk = params.packed
    vals = kernels.forces_moments(
        pk, state.z, state.V, state.gamma, state.alpha, state.beta, state.mu,
        controls.F, controls.delta_l, controls.delta_m, controls.delta_n,
        state.p, state.q, state.r, controls.eta, simplified,
    )
    return ForceTorque(*vals)


def check_domain(state) -> None:
    V = state[3]
    gamma = state[4]
    beta = state[7]
    if V <= 0.0:
        raise DomainError(f"airspeed must be positive, got {V}")
    if abs(gamma) >= math.pi / 2:
        raise DomainError(f"|flight path angle| must stay below pi/2, got {gamma}")
    if abs(beta) >= math.pi / 2:
        raise DomainError(f"|sideslip| must stay below pi/2, got {beta}")


def dynamics(
    params: AircraftParams,
    state: AircraftState | np.ndarray,
    controls: Controls,
    simplified: bool = False,
    wind=(0.0, 0.0, 0.0),
    restricted: bool = False,
) -> np.ndarray:
    """State derivative of the 12-state model (or its 9-state restriction,
    which drops the x, y and chi rows and leaves the rest untouched)."""
    arr = state.as_array() if isinstance(state, AircraftState) else np.asarray(state, dtype=float)
    check_domain(arr)
    out = kernels.dynamics12(
        params.packed, arr, controls.F, controls.delta_l, controls.delta_m,
        controls.delta_n, controls.eta, simplified, wind[0], wind[1], wind[2],
    )
    if restricted:
        return out[list(RESTRICTED_IDX)]
    return out


# GNA model validity envelope (angles rad, rates rad/s), used as simulation guards
_D = math.pi / 180.0
ENVELOPE = {
    "alpha": (-4.0 * _D, 30.0 * _D),
    "beta": (-20.0 * _D, 20.0 * _D),
    "p": (-100.0 * _D, 100.0 * _D),
    "q": (-50.0 * _D, 50.0 * _D),
    "r": (-50.0 * _D, 50.0 * _D),
    "delta_l": (-10.0 * _D, 10.0 * _D),
    "delta_m": (-20.0 * _D, 10.0 * _D),
    "delta_n": (-30.0 * _D, 30.0 * _D),
}


def envelope_violations(state, controls: Controls | None = None) -> list[str]:
    arr = state.as_array() if isinstance(state, AircraftState) else np.asarray(state, dtype=float)
    names = {"alpha": arr[6], "beta": arr[7], "p": arr[9], "q": arr[10], "r": arr[11]}
    if controls is not None:
        names.update(
            {"delta_l": controls.delta_l, "delta_m": controls.delta_m, "delta_n": controls.delta_n}
        )
    out = []
    for key, val in names.items():
        lo, hi = ENVELOPE[key]
        if not (lo <= val <= hi):
            out.append(f"{key}={val:.4f} outside [{lo:.4f}, {hi:.4f}]")
    return out
