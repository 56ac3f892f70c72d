"""Two-loop linearizing feedback built on the simplified model.

The slow loop commands (p, q, r, Fdot) by inverting the affine map onto
(x''', y''', z''', wdot) with the tracking polynomial (X - k1)^3 on each
position channel and a first-order loop on the fourth flat output; the fast
loop commands the surface deflections by inverting the affine torque model
with pole k2, tracking the slow loop's commanded rates with the planned
rate derivatives as feedforward.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aircraft import kernels
from .aircraft.params import AircraftParams
from .planning import OUTPUT_KIND, PlannedTrajectory


class SingularFeedbackError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeedbackGains:
    k1: float = -5.0
    k2: float = -15.0

    def __post_init__(self):
        if self.k1 >= 0 or self.k2 >= 0:
            raise ValueError("poles k1, k2 must be negative")

    @property
    def P(self) -> tuple[float, float, float, float]:
        """Coefficients P0..P3 of (X - k1)^3 (P3 = 1)."""
        k = self.k1
        return (-k**3, 3 * k**2, -3 * k, 1.0)


@dataclass(frozen=True)
class FeedbackStep:
    Fdot: float
    deltas: np.ndarray  # (dl, dm, dn)
    commanded: np.ndarray  # (p, q, r, Fdot)
    det_outer: float
    det_inner: float


def outer_map(pk, state10, cmd, out_kind):
    return np.array(
        kernels.third_derivative_map(
            pk, state10[0], state10[1], state10[2], state10[3], state10[4], state10[5],
            state10[6], state10[7], state10[8], state10[9],
            cmd[0], cmd[1], cmd[2], cmd[3], out_kind,
        )
    )


def outer_affine(pk, state10, out_kind, fd_step: float = 1e-6):
    """Delta0 and Delta1 of the commanded-rate map, by central differences
    per commanded channel (the map is affine, so any step is exact up to
    rounding)."""
    d0 = outer_map(pk, state10, np.zeros(4), out_kind)
    d1 = np.empty((4, 4))
    for k in range(4):
        h = fd_step
        e = np.zeros(4)
        e[k] = h
        d1[:, k] = (outer_map(pk, state10, e, out_kind) - outer_map(pk, state10, -e, out_kind)) / (
            2.0 * h
        )
    return d0, d1


def cascade_feedback(
    params: AircraftParams,
    state13: np.ndarray,
    t: float,
    planned: PlannedTrajectory,
    gains: FeedbackGains,
    det_tol: float = 1e-12,
    known_eta: float = 0.0,
) -> FeedbackStep:
    """One control evaluation: returns Fdot, the deflections, and diagnostics.

    ``state13`` is the 12-state vector with the thrust F appended (F is an
    integrated state because the slow loop commands its derivative).
    ``known_eta`` is the differential-thrust ratio the controller knows
    about (1 for a declared engine-out), entering the fast loop's torque
    model.
    """
    pk = params.packed
    ref = planned.reference
    out_kind = OUTPUT_KIND[planned.output_set]
    k_ref = planned.sample_index(t)
    st = state13
    state10 = np.array([st[0], st[1], st[2], st[3], st[4], st[5], st[6], st[7], st[8], st[12]])

    # reference position derivatives (analytic) and fourth output
    tt = np.array([min(max(t, ref.t0), ref.t1)])
    pos = ref.position_derivatives(tt)[:, :, 0]
    wref = ref.output_derivatives(tt)[:, 0]

    # current position derivative chain from the model
    xd, yd, zd, xdd, ydd, zdd = kernels.position_chain(
        pk, st[2], st[3], st[4], st[5], st[6], st[7], st[8], st[12]
    )
    P0, P1, P2, P3 = gains.P
    v = np.empty(4)
    cur = ((st[0], xd, xdd), (st[1], yd, ydd), (st[2], zd, zdd))
    for ax in range(3):
        v[ax] = (
            P0 * (pos[ax, 0] - cur[ax][0])
            + P1 * (pos[ax, 1] - cur[ax][1])
            + P2 * (pos[ax, 2] - cur[ax][2])
            + P3 * pos[ax, 3]
        )
    w_now = {0: st[7], 1: st[8], 2: st[12]}[out_kind]
    v[3] = -gains.k1 * (wref[0] - w_now) + wref[1]

    d0, d1 = outer_affine(pk, state10, out_kind)
    det_outer = float(np.linalg.det(d1))
    if abs(det_outer) < det_tol:
        raise SingularFeedbackError(f"outer inversion singular at t={t:.3f}s (det={det_outer:.3e})")
    cmd = np.linalg.solve(d1, v - d0)

    # fast loop on the body rates
    L0, M0, N0, B = kernels.moment_affine(
        pk, st[2], st[3], st[6], st[7], st[9], st[10], st[11], st[12], known_eta
    )
    g1, g2, g3 = kernels.gyroscopic(pk, st[9], st[10], st[11])
    w_inner = -gains.k2 * (cmd[:3] - st[9:12]) + planned.rate_dots[k_ref]
    J = params.inertia
    need = J @ w_inner - np.array([g1, g2, g3]) - np.array([L0, M0, N0])
    det_inner = float(np.linalg.det(B))
    if abs(det_inner) < det_tol:
        raise SingularFeedbackError(f"inner inversion singular at t={t:.3f}s (det={det_inner:.3e})")
    deltas = np.linalg.solve(B, need)
    return FeedbackStep(
        Fdot=float(cmd[3]),
        deltas=deltas,
        commanded=cmd,
        det_outer=det_outer,
        det_inner=det_inner,
    )


def error_envelope(k1: float, t: np.ndarray, e0: float) -> np.ndarray:
    """Bound C (1 + t + t^2) e^{k1 t} on the triple-pole error response from
    a pure position offset e0 (zero derivative error): the exact solution is
    e0 (1 - k1 t + k1^2 t^2 / 2) e^{k1 t}, whose polynomial part is dominated
    by max(1, -k1, k1^2/2) (1 + t + t^2)."""
    C = abs(e0) * max(1.0, -k1, 0.5 * k1 * k1)
    return C * (1.0 + t + t**2) * np.exp(k1 * t)


def triple_pole_response(k1: float, t: np.ndarray, e0: float, de0: float = 0.0, dde0: float = 0.0):
    """Closed-form solution of (d/dt - k1)^3 e = 0."""
    c1 = de0 - k1 * e0
    c2 = 0.5 * (dde0 - 2.0 * k1 * de0 + k1 * k1 * e0)
    return (e0 + c1 * t + c2 * t**2) * np.exp(k1 * t)
