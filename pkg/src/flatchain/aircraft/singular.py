"""Flat-output singularity determinants and closed-form block determinants.

The 4-column matrix d(X, S, C)/d(alpha, beta, mu, F) (with S, C the banked
combinations of Y and Z) loses rank exactly at the flat singularities; the
determinant obtained by deleting the column of a candidate fourth output is
that output's singularity indicator.  The kinematic block determinants have
closed forms (-V^2 cos(gamma) and 1/cos(beta), in the implicit-equation
orientation d(state)/dt - rhs = 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import AircraftParams, AircraftState, Controls


@dataclass(frozen=True)
class SingularityDeterminants:
    delta_beta: float
    delta_mu: float
    delta_F: float
    delta_alpha: float
    position_block: float  # det d(P_xyz)/d(V, gamma, chi): closed form -V^2 cos(gamma)
    rates_block: float  # det d(P_angles)/d(p, q, r): closed form 1/cos(beta)
    deflection_block: float  # det d(P_rates)/d(deltas)


_DROP = {"beta": 1, "mu": 2, "F": 3, "alpha": 0}


def flat_output_jacobian(
    params: AircraftParams, state: AircraftState, controls: Controls, simplified: bool = True
) -> np.ndarray:
    return kernels.q_jacobian(
        params.packed, state.z, state.V, state.gamma, state.alpha, state.beta,
        state.mu, controls.F, simplified,
    )


def output_determinant(
    params: AircraftParams,
    state: AircraftState,
    controls: Controls,
    output: str,
    simplified: bool = True,
) -> float:
    """det of the flat-output Jacobian with the column of ``output`` removed."""
    full = flat_output_jacobian(params, state, controls, simplified)
    keep = [k for k in range(4) if k != _DROP[output]]
    return float(np.linalg.det(full[:, keep]))


def position_block_det(state: AircraftState) -> float:
    """Implicit-form determinant of the position equations w.r.t. (V, gamma, chi)."""
    V = state.V
    cg = math.cos(state.gamma)
    sg = math.sin(state.gamma)
    cc = math.cos(state.chi)
    sc = math.sin(state.chi)
    J = -np.array(
        [
            [cc * cg, -V * cc * sg, -V * sc * cg],
            [sc * cg, -V * sc * sg, V * cc * cg],
            [-sg, -V * cg, 0.0],
        ]
    )
    return float(np.linalg.det(J))


def rates_block_det(params: AircraftParams, state: AircraftState) -> float:
    """Implicit-form determinant of the angle equations w.r.t. (p, q, r)."""
    M = kernels.rate_solve_matrix(state.alpha, state.beta)
    return float(np.linalg.det(-M))


def deflection_block_det(
    params: AircraftParams, state: AircraftState, controls: Controls
) -> float:
    """det of d(pdot, qdot, rdot)/d(deltas) = det(J^-1 B_delta)."""
    _, _, _, B = kernels.moment_affine(
        params.packed, state.z, state.V, state.alpha, state.beta,
        state.p, state.q, state.r, controls.F, controls.eta,
    )
    return float(np.linalg.det(np.linalg.solve(params.inertia, B)))


def singularity_determinants(
    params: AircraftParams,
    state: AircraftState,
    controls: Controls,
    simplified: bool = True,
) -> SingularityDeterminants:
    return SingularityDeterminants(
        delta_beta=output_determinant(params, state, controls, "beta", simplified),
        delta_mu=output_determinant(params, state, controls, "mu", simplified),
        delta_F=output_determinant(params, state, controls, "F", simplified),
        delta_alpha=output_determinant(params, state, controls, "alpha", simplified),
        position_block=position_block_det(state),
        rates_block=rates_block_det(params, state),
        deflection_block=deflection_block_det(params, state, controls),
    )
