"""Flat trajectory planning for the simplified model.

Given three position reference functions and one of {beta, mu, F} as the
fourth flat output, every state and control follows block by block: airspeed
and path angles from the velocity; the remaining attitude/thrust triple from
a 3x3 force balance solved by damped Newton; body rates from the inverted
angle kinematics; surface deflections from the affine torque model.  Time
derivatives of the Newton-solved chain values come from central differences
on the planning grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .aircraft import kernels
from .aircraft.params import AircraftParams

OUTPUT_KIND = {"beta": 0, "mu": 1, "F": 2}
KIND_UNKNOWNS = {0: (0, 2, 3), 1: (0, 1, 3), 2: (0, 1, 2)}  # columns of (a, b, mu, F)


class PlanningError(RuntimeError):
    pass


class ReferenceTrajectory:
    """Three positions with derivatives to order 4 plus one scalar flat
    output with derivatives to order 2, over [t0, t1]."""

    t0: float
    t1: float

    def position_derivatives(self, t: np.ndarray) -> np.ndarray:
        """Array of shape (3, 5, len(t)): axis, derivative order 0..4."""
        raise NotImplementedError

    def output_derivatives(self, t: np.ndarray) -> np.ndarray:
        """Array of shape (3, len(t)): derivative order 0..2."""
        raise NotImplementedError


@dataclass
class HelixReference(ReferenceTrajectory):
    """Half-turn climbing helix at constant horizontal speed:
    x = R cos(pi (t - t0)/T), y = R sin(...), z = -climb_rate t - z0 with
    R = speed T / pi, so the horizontal speed is ``speed`` throughout."""

    speed: float = 30.0
    climb_rate: float = 5.0
    t0: float = 0.0
    t1: float = 30.0
    z0: float = 1000.0
    output_value: float = 0.0

    @property
    def amplitude(self) -> float:
        return self.speed * (self.t1 - self.t0) / math.pi

    def position_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        T = self.t1 - self.t0
        w = math.pi / T
        ph = w * (t - self.t0)
        out = np.zeros((3, 5, t.size))
        A = self.amplitude
        c, s = np.cos(ph), np.sin(ph)
        out[0, 0] = A * c
        out[0, 1] = -A * w * s
        out[0, 2] = -A * w**2 * c
        out[0, 3] = A * w**3 * s
        out[0, 4] = A * w**4 * c
        out[1, 0] = A * s
        out[1, 1] = A * w * c
        out[1, 2] = -A * w**2 * s
        out[1, 3] = -A * w**3 * c
        out[1, 4] = A * w**4 * s
        out[2, 0] = -self.climb_rate * t - self.z0
        out[2, 1] = -self.climb_rate
        return out

    def output_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((3, t.size))
        out[0] = self.output_value
        return out


@dataclass
class ParabolaReference(ReferenceTrajectory):
    """Gravity-free parabola: x = vx t, y = 0, z = g t^2 / 2 - h."""

    vx: float = 750.0 / 3.6
    g: float = 9.80665
    h: float = 2000.0
    t0: float = 0.0
    t1: float = 15.0
    output_value: float = 0.0  # bank angle

    def position_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((3, 5, t.size))
        out[0, 0] = self.vx * t
        out[0, 1] = self.vx
        out[2, 0] = 0.5 * self.g * t**2 - self.h
        out[2, 1] = self.g * t
        out[2, 2] = self.g
        return out

    def output_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((3, t.size))
        out[0] = self.output_value
        return out


@dataclass
class LevelReference(ReferenceTrajectory):
    """Straight level flight along x at constant speed."""

    V: float = 50.0
    altitude: float = 1000.0
    t0: float = 0.0
    t1: float = 10.0
    output_value: float = 0.0

    def position_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((3, 5, t.size))
        out[0, 0] = self.V * t
        out[0, 1] = self.V
        out[2, 0] = -self.altitude
        return out

    def output_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((3, t.size))
        out[0] = self.output_value
        return out


@dataclass
class PolynomialReference(ReferenceTrajectory):
    """Positions and output given by polynomial coefficient lists (low order
    first)."""

    x_coeffs: tuple
    y_coeffs: tuple
    z_coeffs: tuple
    w_coeffs: tuple
    t0: float = 0.0
    t1: float = 10.0

    @staticmethod
    def _poly_derivs(coeffs, t, orders):
        poly = np.polynomial.Polynomial(coeffs)
        out = np.zeros((orders, t.size))
        for k in range(orders):
            out[k] = poly.deriv(k)(t) if k else poly(t)
        return out

    def position_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack(
            [
                self._poly_derivs(self.x_coeffs, t, 5),
                self._poly_derivs(self.y_coeffs, t, 5),
                self._poly_derivs(self.z_coeffs, t, 5),
            ]
        )

    def output_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        return self._poly_derivs(self.w_coeffs, t, 3)


@dataclass
class SampledOutputReference(ReferenceTrajectory):
    """Positions from another reference, fourth output from a sampled array
    (derivatives by central differences); used for output-set cross-checks."""

    base: ReferenceTrajectory
    grid: np.ndarray
    samples: np.ndarray

    def __post_init__(self):
        self.t0 = self.base.t0
        self.t1 = self.base.t1

    def position_derivatives(self, t):
        return self.base.position_derivatives(t)

    def output_derivatives(self, t):
        t = np.asarray(t, dtype=float)
        w = np.interp(t, self.grid, self.samples)
        wd_full = np.gradient(self.samples, self.grid)
        wdd_full = np.gradient(wd_full, self.grid)
        return np.stack([w, np.interp(t, self.grid, wd_full), np.interp(t, self.grid, wdd_full)])


def check_reference(ref: ReferenceTrajectory, n: int = 41, rtol: float = 1e-4) -> float:
    """Cross-check the derivative providers against finite differences of the
    value functions; returns the worst relative mismatch."""
    t = np.linspace(ref.t0, ref.t1, n)
    h = 1e-5 * max(1.0, ref.t1 - ref.t0)
    worst = 0.0
    pos_p = ref.position_derivatives(np.clip(t + h, ref.t0, ref.t1))
    pos_m = ref.position_derivatives(np.clip(t - h, ref.t0, ref.t1))
    pos = ref.position_derivatives(t)
    dt = np.clip(t + h, ref.t0, ref.t1) - np.clip(t - h, ref.t0, ref.t1)
    for ax in range(3):
        for k in range(4):
            fd = (pos_p[ax, k] - pos_m[ax, k]) / dt
            scale = np.max(np.abs(pos[ax, k + 1])) + 1.0
            worst = max(worst, float(np.max(np.abs(fd - pos[ax, k + 1])) / scale))
    return worst


@dataclass
class PlannedTrajectory:
    """Time grid with the full state/control history and the flat chain."""

    params: AircraftParams
    output_set: str
    t: np.ndarray
    states: np.ndarray  # (N, 12)
    controls: np.ndarray  # (N, 4): F, dl, dm, dn
    Fdot: np.ndarray
    rate_dots: np.ndarray  # (N, 3): pdot, qdot, rdot
    chain: dict = field(default_factory=dict)  # V/gamma/chi + derivatives etc.
    reference: ReferenceTrajectory | None = None
    min_output_det: float = float("inf")

    @property
    def grid_step(self) -> float:
        return float(self.t[1] - self.t[0])

    def sample_index(self, t: float) -> int:
        k = int(round((t - self.t[0]) / self.grid_step))
        return min(max(k, 0), len(self.t) - 1)


def _fd(arr: np.ndarray, h: float) -> np.ndarray:
    """Central differences inside, one-sided at the ends (numpy.gradient)."""
    return np.gradient(arr, h, edge_order=1)


def _newton_sample(pk, kind, z, V, gamma, targets, guess, simplified=True,
                   tol=1e-12, max_iter=60):
    """Solve the three force equations for the complementary triple of
    (alpha, beta, mu, F); the given flat output is frozen inside ``guess``."""
    cols = KIND_UNKNOWNS[kind]
    vec = np.array(guess, dtype=float)  # full (alpha, beta, mu, F)
    scale = max(abs(targets[0]), abs(targets[1]), abs(targets[2]), 1.0)
    det = 0.0
    for _ in range(max_iter):
        X, S, C = kernels.q_vector(pk, z, V, gamma, vec[0], vec[1], vec[2], vec[3], simplified)
        res = np.array([X - targets[0], S - targets[1], C - targets[2]])
        if np.max(np.abs(res)) < tol * scale:
            J = kernels.q_jacobian(pk, z, V, gamma, vec[0], vec[1], vec[2], vec[3], simplified)
            det = float(np.linalg.det(J[:, cols]))
            return vec, det
        J = kernels.q_jacobian(pk, z, V, gamma, vec[0], vec[1], vec[2], vec[3], simplified)
        Jsub = J[:, cols]
        det = float(np.linalg.det(Jsub))
        try:
            step = np.linalg.solve(Jsub, -res)
        except np.linalg.LinAlgError:
            return None, det
        lam = 1.0
        improved = False
        base = np.max(np.abs(res))
        for _ in range(25):
            cand = vec.copy()
            for idx, col in enumerate(cols):
                cand[col] += lam * step[idx]
            Xc, Sc, Cc = kernels.q_vector(pk, z, V, gamma, cand[0], cand[1], cand[2], cand[3], simplified)
            if max(abs(Xc - targets[0]), abs(Sc - targets[1]), abs(Cc - targets[2])) < base:
                vec = cand
                improved = True
                break
            lam *= 0.5
        if not improved:
            return None, det
    return None, det


def _coarse_seed(pk, kind, z, V, gamma, targets, w_value, mg):
    """Grid fallback for the first-sample Newton initialization.

    Scans the three unknown channels (thrust replaced by the given output
    when thrust is the flat output); zero is excluded from the scanned
    angles so the seed starts clear of the symmetric singularities.
    """
    best = None
    alphas = np.linspace(-0.05, 0.45, 11)
    angles = [a for a in np.linspace(-0.6, 0.6, 9) if abs(a) > 1e-9] or [0.1]
    thrusts = np.linspace(0.0, 2.5 * mg, 9)
    for a in alphas:
        for b in angles:
            if kind == 2:
                third = angles
            else:
                third = thrusts
            for c in third:
                vec = np.zeros(4)
                vec[0] = a
                if kind == 0:
                    vec[1], vec[2], vec[3] = w_value, b, c
                elif kind == 1:
                    vec[1], vec[2], vec[3] = b, w_value, c
                else:
                    vec[1], vec[2], vec[3] = b, c, w_value
                X, S, C = kernels.q_vector(pk, z, V, gamma, vec[0], vec[1], vec[2], vec[3], True)
                err = (X - targets[0]) ** 2 + (S - targets[1]) ** 2 + (C - targets[2]) ** 2
                if best is None or err < best[0]:
                    best = (err, vec)
    return best[1]


def flat_parametrize(
    params: AircraftParams,
    ref: ReferenceTrajectory,
    output_set: str = "beta",
    grid_step: float = 1e-3,
) -> PlannedTrajectory:
    """Numerical lazy flat parametrization of the simplified model."""
    if output_set not in OUTPUT_KIND:
        raise ValueError("output_set must be one of beta, mu, F")
    kind = OUTPUT_KIND[output_set]
    pk = params.packed
    m = params.m
    n = int(round((ref.t1 - ref.t0) / grid_step)) + 1
    t = ref.t0 + grid_step * np.arange(n)
    pos = ref.position_derivatives(t)
    wout = ref.output_derivatives(t)

    xd, yd, zd = pos[0, 1], pos[1, 1], pos[2, 1]
    xdd, ydd, zdd = pos[0, 2], pos[1, 2], pos[2, 2]
    xd3, yd3, zd3 = pos[0, 3], pos[1, 3], pos[2, 3]
    V = np.sqrt(xd**2 + yd**2 + zd**2)
    if np.any(V <= 0):
        raise PlanningError("reference speed vanishes")
    sg = -zd / V
    if np.any(np.abs(sg) >= 1.0):
        raise PlanningError("reference flight path angle reaches +-pi/2")
    gamma = -np.arcsin(zd / V)
    if np.any(xd**2 + yd**2 <= 0):
        raise PlanningError("heading undefined: horizontal speed vanishes")
    chi = np.unwrap(np.arctan2(yd, xd))
    Vd = (xd * xdd + yd * ydd + zd * zdd) / V
    cg = np.cos(gamma)
    gd = -(zdd * V - zd * Vd) / (V**2 * cg)
    h2 = xd**2 + yd**2
    cd = (ydd * xd - xdd * yd) / h2
    # second derivatives of (V, gamma, chi), for the stored chain
    Vdd = (xdd**2 + ydd**2 + zdd**2 + xd * xd3 + yd * yd3 + zd * zd3 - Vd**2) / V
    num = zd3 * V - zd * Vdd
    gdd = (-num + (zdd * V - zd * Vd) * (2.0 * Vd / V - np.tan(gamma) * gd)) / (V**2 * cg)
    hd = 2.0 * (xd * xdd + yd * ydd)
    cdd = (yd3 * xd - xd3 * yd) / h2 - (ydd * xd - xdd * yd) * hd / h2**2

    z_arr = pos[2, 0]
    targets = np.stack([m * Vd, -m * V * gd, m * V * cg * cd], axis=1)

    xi2 = np.empty((n, 4))  # alpha, beta, mu, F columns
    dets = np.empty(n)
    guess = np.zeros(4)
    w0 = float(wout[0, 0])
    if kind == 0:
        guess[1] = w0
    elif kind == 1:
        guess[2] = w0
    else:
        guess[3] = w0
    guess[3] = guess[3] if kind == 2 else m * params.g / 8.0
    for k in range(n):
        if kind == 0:
            guess[1] = wout[0, k]
        elif kind == 1:
            guess[2] = wout[0, k]
        else:
            guess[3] = wout[0, k]
        vec, det = _newton_sample(pk, kind, z_arr[k], V[k], gamma[k], targets[k], guess)
        if vec is None and k == 0:
            guess = _coarse_seed(pk, kind, z_arr[k], V[k], gamma[k], targets[k], wout[0, k], m * params.g)
            vec, det = _newton_sample(pk, kind, z_arr[k], V[k], gamma[k], targets[k], guess)
        if vec is None:
            raise PlanningError(
                f"force balance Newton diverged at t={t[k]:.3f}s "
                f"(|output-set determinant| = {abs(det):.3e}; singularity proximity)"
            )
        xi2[k] = vec
        dets[k] = det
        guess = vec.copy()

    alpha, beta, mu, F = xi2[:, 0], xi2[:, 1], xi2[:, 2], xi2[:, 3]
    h = grid_step
    ad, bd, md = _fd(alpha, h), _fd(beta, h), _fd(mu, h)
    Fd = _fd(F, h)

    # body rates from the inverted angle kinematics
    rates = np.empty((n, 3))
    for k in range(n):
        fm = kernels.forces_moments(
            pk, z_arr[k], V[k], gamma[k], alpha[k], beta[k], mu[k], F[k],
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, True,
        )
        Yk, Zk = fm[1], fm[2]
        mV = m * V[k]
        cb = math.cos(beta[k])
        tg = math.tan(gamma[k])
        sb = math.sin(beta[k])
        smu = math.sin(mu[k])
        cmu = math.cos(mu[k])
        W = Yk * cmu * tg * cb - Zk * (smu * tg * cb + sb)
        rhs = np.array(
            [ad[k] - Zk / (mV * cb), bd[k] - Yk / mV, md[k] - W / (mV * cb)]
        )
        M = kernels.rate_solve_matrix(alpha[k], beta[k])
        rates[k] = np.linalg.solve(M, rhs)

    p_arr, q_arr, r_arr = rates[:, 0], rates[:, 1], rates[:, 2]
    pd, qd, rd = _fd(p_arr, h), _fd(q_arr, h), _fd(r_arr, h)

    # surface deflections from the affine torque model
    deltas = np.empty((n, 3))
    J = params.inertia
    for k in range(n):
        L0, M0, N0, B = kernels.moment_affine(
            pk, z_arr[k], V[k], alpha[k], beta[k], p_arr[k], q_arr[k], r_arr[k], F[k], 0.0
        )
        g1, g2, g3 = kernels.gyroscopic(pk, p_arr[k], q_arr[k], r_arr[k])
        need = J @ np.array([pd[k], qd[k], rd[k]]) - np.array([g1, g2, g3]) - np.array([L0, M0, N0])
        deltas[k] = np.linalg.solve(B, need)

    states = np.column_stack(
        [pos[0, 0], pos[1, 0], z_arr, V, gamma, chi, alpha, beta, mu, p_arr, q_arr, r_arr]
    )
    controls = np.column_stack([F, deltas])
    chain = {
        "V": V, "gamma": gamma, "chi": chi,
        "Vd": Vd, "gammad": gd, "chid": cd,
        "Vdd": Vdd, "gammadd": gdd, "chidd": cdd,
        "alphad": ad, "betad": bd, "mud": md,
        "output_det": dets,
    }
    return PlannedTrajectory(
        params=params,
        output_set=output_set,
        t=t,
        states=states,
        controls=controls,
        Fdot=Fd,
        rate_dots=np.column_stack([pd, qd, rd]),
        chain=chain,
        reference=ref,
        min_output_det=float(np.min(np.abs(dets))),
    )


def dynamics_residual(planned: PlannedTrajectory) -> np.ndarray:
    """Max |model rhs - numerical state derivative| per interior sample.

    The numerical derivative is the central difference of the planned state
    arrays; this is the planner's self-consistency oracle.
    """
    pk = planned.params.packed
    st = planned.states
    ct = planned.controls
    h = planned.grid_step
    n = len(planned.t)
    out = np.zeros(n)
    num = np.gradient(st, h, axis=0, edge_order=1)
    for k in range(1, n - 1):
        rhs = kernels.dynamics12(
            pk, st[k], ct[k, 0], ct[k, 1], ct[k, 2], ct[k, 3], 0.0, True, 0.0, 0.0, 0.0
        )
        diff = rhs - num[k]
        # heading row: compare modulo winding
        diff[5] = (diff[5] + math.pi) % (2.0 * math.pi) - math.pi
        out[k] = np.max(np.abs(diff))
    return out
