"""Straight level trim and stall analysis.

Level trim solves X = 0 and Z = 0 for (V, F) at a prescribed angle of
attack, with beta = mu = gamma = 0 and zero rates; the full model adds the
pitch balance C_m = 0 solved with the elevator (lateral surfaces stay 0 by
symmetry).  Stall is the interior minimum of the trim speed curve V(alpha),
equivalently the extremum of the substituted lift; if the required thrust
crosses F_max first the stall point is thrust-limited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .params import AircraftParams

_D = math.pi / 180.0
ALPHA_RANGE = (-4.0 * _D, 30.0 * _D)


class TrimError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrimPoint:
    alpha: float
    V: float
    F: float
    delta_m: float  # 0 in the simplified model


def _trim_residual(pk, alpha, V, F, dm, full):
    simplified = not full
    X, Y, Z = kernels.forces_moments(
        pk, -1000.0, V, 0.0, alpha, 0.0, 0.0, F, 0.0, dm, 0.0, 0.0, 0.0, 0.0, 0.0, simplified
    )[:3]
    if not full:
        return np.array([X, Z])
    _, Cm, _ = kernels.moment_coeffs(pk, V, alpha, 0.0, 0.0, 0.0, 0.0, 0.0, dm, 0.0)
    return np.array([X, Z, Cm])


def trim_level_flight(
    params: AircraftParams,
    alpha: float,
    model: str = "simplified",
    V0: float = 100.0,
    tol: float = 1e-10,
    max_iter: int = 80,
) -> TrimPoint:
    """Damped Newton on the level-flight balance at fixed angle of attack."""
    if model not in ("simplified", "full"):
        raise ValueError("model must be 'simplified' or 'full'")
    full = model == "full"
    pk = params.packed
    x = np.array([V0, params.m * params.g / 10.0, 0.0][: 3 if full else 2])
    res = _trim_residual(pk, alpha, x[0], x[1], x[2] if full else 0.0, full)
    scale = params.m * params.g
    for _ in range(max_iter):
        norm = float(np.max(np.abs(res))) / scale
        if norm < tol:
            break
        J = np.empty((len(x), len(x)))
        for k in range(len(x)):
            h = 1e-6 * max(1.0, abs(x[k]))
            xp = x.copy()
            xp[k] += h
            xm = x.copy()
            xm[k] -= h
            J[:, k] = (
                _trim_residual(pk, alpha, xp[0], xp[1], xp[2] if full else 0.0, full)
                - _trim_residual(pk, alpha, xm[0], xm[1], xm[2] if full else 0.0, full)
            ) / (2.0 * h)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise TrimError(f"singular trim Jacobian at alpha={alpha:.4f}") from exc
        lam = 1.0
        best = None
        for _ in range(30):
            cand = x + lam * step
            if cand[0] > 1e-3:  # keep V positive
                r2 = _trim_residual(pk, alpha, cand[0], cand[1], cand[2] if full else 0.0, full)
                if np.max(np.abs(r2)) < np.max(np.abs(res)):
                    best = (cand, r2)
                    break
            lam *= 0.5
        if best is None:
            raise TrimError(f"trim Newton stalled at alpha={alpha:.4f}")
        x, res = best
    else:
        raise TrimError(f"trim Newton did not converge at alpha={alpha:.4f}")
    V, F = float(x[0]), float(x[1])
    if V <= 0.0 or not math.isfinite(V):
        raise TrimError(f"no positive-V trim at alpha={alpha:.4f}")
    if F < 0.0:
        raise TrimError(f"no positive-V solution: trim thrust negative at alpha={alpha:.4f}")
    if full:
        dm = float(x[2])
    else:
        # pitch balance: the elevator does not enter the simplified forces,
        # so it decouples from (V, F) and zeroes C_m on its own
        th = params.theta
        num = th[28] + th[29] * alpha + th[37] * alpha**4
        den = th[31] + th[34] * alpha**2 + th[36] * alpha**3
        dm = -num / den if den != 0.0 else 0.0
    return TrimPoint(alpha=alpha, V=V, F=F, delta_m=dm)


@dataclass(frozen=True)
class StallResult:
    case: str  # "extremum" | "thrust-limited" | "none"
    alpha: float | None
    V: float | None
    F: float | None
    sweep: tuple  # (alphas, Vs, Fs, delta_ms) arrays over the feasible grid


def _golden_min(f, a, b, tol=1e-8):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def stall_analysis(
    params: AircraftParams,
    model: str = "simplified",
    F_max: float | None = None,
    alpha_step: float = 0.001,
) -> StallResult:
    """Sweep the trim curve over the model's alpha range and locate stall.

    The sweep tolerates infeasible grid points at the range edges (no
    positive-lift trim below the zero-lift angle).  The V(alpha) minimum is
    refined by golden-section search on the continuous trim map.
    """
    fmax = params.F_max if F_max is None else F_max
    alphas = []
    Vs = []
    Fs = []
    dms = []
    a = ALPHA_RANGE[0]
    last = None
    while a <= ALPHA_RANGE[1] + 1e-12:
        try:
            tp = trim_level_flight(params, a, model, V0=last.V if last else 100.0)
        except TrimError:
            tp = None
        if tp is not None:
            alphas.append(a)
            Vs.append(tp.V)
            Fs.append(tp.F)
            dms.append(tp.delta_m)
            last = tp
        elif last is not None:
            break  # feasible band ended
        a += alpha_step
    if not alphas:
        raise TrimError("no feasible trim anywhere in the alpha range")
    sweep = (np.array(alphas), np.array(Vs), np.array(Fs), np.array(dms))
    k_min = int(np.argmin(sweep[1]))
    interior = 0 < k_min < len(alphas) - 1

    # thrust limit: first upward crossing of F_max beyond the F minimum
    k_fmin = int(np.argmin(sweep[2]))
    k_cross = None
    for k in range(k_fmin, len(alphas) - 1):
        if sweep[2][k] <= fmax < sweep[2][k + 1]:
            k_cross = k
            break
    if k_cross is not None and (not interior or alphas[k_cross] < alphas[k_min]):
        lo, hi = alphas[k_cross], alphas[k_cross + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if trim_level_flight(params, mid, model, V0=Vs[k_cross]).F > fmax:
                hi = mid
            else:
                lo = mid
        tp = trim_level_flight(params, lo, model, V0=Vs[k_cross])
        return StallResult("thrust-limited", lo, tp.V, tp.F, sweep)

    if not interior:
        return StallResult("none", None, None, None, sweep)

    lo = alphas[max(0, k_min - 1)]
    hi = alphas[min(len(alphas) - 1, k_min + 1)]
    a_star = _golden_min(lambda aa: trim_level_flight(params, aa, model, V0=Vs[k_min]).V, lo, hi)
    tp = trim_level_flight(params, a_star, model, V0=Vs[k_min])
    return StallResult("extremum", a_star, tp.V, tp.F, sweep)
