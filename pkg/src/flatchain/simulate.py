"""Closed-loop simulation: fixed-step RK4 on the chosen dynamics under the
cascade feedback, with initial-offset, engine-out and sinusoidal-wind
perturbations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .aircraft import kernels
from .aircraft.aero import check_domain, envelope_violations
from .aircraft.params import AircraftParams, Controls
from .feedback import FeedbackGains, cascade_feedback
from .planning import OUTPUT_KIND, PlannedTrajectory


@dataclass(frozen=True)
class Perturbation:
    kind: str = "none"  # label: none | initial-offset | engine-out | sinusoidal-wind
    offset: np.ndarray | None = None  # added to the initial 12-state
    engine_out: bool = False  # F2 = 0, so the differential ratio is forced to 1
    wind_amplitude: float = 0.0  # N
    wind_frequency: float = 0.0  # Hz
    wind_direction: str = "earth-y"  # earth-x | earth-y | track (drag axis)

    def __post_init__(self):
        if self.wind_amplitude < 0:
            raise ValueError("wind amplitude must be nonnegative")
        if self.wind_direction not in ("earth-x", "earth-y", "track"):
            raise ValueError("wind_direction must be earth-x, earth-y or track")


@dataclass
class SimulationResult:
    t: np.ndarray
    states: np.ndarray  # (N, 13): 12 states + thrust F
    controls: np.ndarray  # (N, 4): F, dl, dm, dn
    commanded: np.ndarray  # (N, 4): p, q, r, Fdot
    errors: np.ndarray  # (N, 4): flat output tracking errors
    output_names: tuple[str, str, str, str]
    status: str  # "completed" | "terminated"
    termination: str | None
    metrics: dict = field(default_factory=dict)


def _wind_force(pert: Perturbation, t: float) -> float:
    return pert.wind_amplitude * math.sin(2.0 * math.pi * pert.wind_frequency * t)


def simulate_closed_loop(
    params: AircraftParams,
    planned: PlannedTrajectory,
    gains: FeedbackGains | None = None,
    perturbation: Perturbation | None = None,
    model: str = "simplified",
    step: float = 1e-3,
    t_final: float | None = None,
    enforce_envelope: bool = True,
) -> SimulationResult:
    """Integrate the closed loop along a planned trajectory.

    Controls are held over each RK4 step.  The feedback always uses the
    simplified model; ``model`` selects the plant being integrated.  The run
    terminates early (with diagnostics) if the state leaves the dynamics
    domain or, when ``enforce_envelope`` is set, the aerodynamic envelope.
    """
    gains = gains or FeedbackGains()
    pert = perturbation or Perturbation()
    ref = planned.reference
    simplified = model != "full"
    pk = params.packed
    t0 = ref.t0
    t_end = ref.t1 if t_final is None else min(t_final, ref.t1)
    n = int(round((t_end - t0) / step)) + 1
    t = t0 + step * np.arange(n)
    eta = 1.0 if pert.engine_out else 0.0
    out_kind = OUTPUT_KIND[planned.output_set]
    out_names = ("x", "y", "z", planned.output_set)

    state = np.empty(13)
    state[:12] = planned.states[0]
    state[12] = planned.controls[0, 0]
    if pert.offset is not None:
        state[:12] += np.asarray(pert.offset, dtype=float)

    states = np.zeros((n, 13))
    controls = np.zeros((n, 4))
    commanded = np.zeros((n, 4))
    errors = np.zeros((n, 4))
    status = "completed"
    termination = None
    steps_done = n
    envelope_hits = 0
    thrust_saturation_hits = 0

    def rhs(tk: float, st: np.ndarray, fdot: float, deltas: np.ndarray) -> np.ndarray:
        amp = _wind_force(pert, tk)
        wx = wy = 0.0
        if pert.wind_direction == "earth-x":
            wx = amp
        elif pert.wind_direction == "earth-y":
            wy = amp
        d12 = kernels.dynamics12(
            pk, st[:12], st[12], deltas[0], deltas[1], deltas[2], eta,
            simplified, wx, wy, 0.0,
        )
        if pert.wind_direction == "track" and amp != 0.0:
            d12[3] += amp / params.m  # drag-axis gust acts on the airspeed row
        return np.append(d12, fdot)

    for k in range(n):
        states[k] = state
        tt = np.array([t[k]])
        pos = ref.position_derivatives(tt)[:, 0, 0]
        wref = ref.output_derivatives(tt)[0, 0]
        w_now = {0: state[7], 1: state[8], 2: state[12]}[out_kind]
        errors[k] = [pos[0] - state[0], pos[1] - state[1], pos[2] - state[2], wref - w_now]
        try:
            check_domain(state)
            fb = cascade_feedback(params, state, t[k], planned, gains, known_eta=eta)
        except Exception as exc:  # domain or singularity failure
            status = "terminated"
            termination = f"t={t[k]:.3f}s: {exc}"
            steps_done = k + 1
            break
        controls[k] = [state[12], fb.deltas[0], fb.deltas[1], fb.deltas[2]]
        commanded[k] = fb.commanded
        if state[12] < 0.0 or state[12] > params.F_max:
            thrust_saturation_hits += 1
        bad = envelope_violations(
            state[:12],
            Controls(state[12], fb.deltas[0], fb.deltas[1], fb.deltas[2]),
        )
        if bad:
            envelope_hits += 1
            if enforce_envelope:
                status = "terminated"
                termination = f"t={t[k]:.3f}s: envelope violated: {'; '.join(bad)}"
                steps_done = k + 1
                break
        if k == n - 1:
            break
        h = step
        k1v = rhs(t[k], state, fb.Fdot, fb.deltas)
        k2v = rhs(t[k] + h / 2, state + h / 2 * k1v, fb.Fdot, fb.deltas)
        k3v = rhs(t[k] + h / 2, state + h / 2 * k2v, fb.Fdot, fb.deltas)
        k4v = rhs(t[k] + h, state + h * k3v, fb.Fdot, fb.deltas)
        state = state + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not np.all(np.isfinite(state)):
            status = "terminated"
            termination = f"t={t[k]:.3f}s: state diverged"
            steps_done = k + 1
            break

    sl = slice(0, steps_done)
    err = errors[sl]
    metrics = {
        "max_error": {nm: float(np.max(np.abs(err[:, i]))) for i, nm in enumerate(out_names)},
        "final_error": {nm: float(abs(err[-1, i])) for i, nm in enumerate(out_names)},
        "steps": int(steps_done),
        "envelope_violation_steps": int(envelope_hits),
        "thrust_range_violation_steps": int(thrust_saturation_hits),
    }
    return SimulationResult(
        t=t[sl],
        states=states[sl],
        controls=controls[sl],
        commanded=commanded[sl],
        errors=err,
        output_names=out_names,
        status=status,
        termination=termination,
        metrics=metrics,
    )


def dominant_frequency(t: np.ndarray, signal: np.ndarray, f_min: float = 0.02) -> float:
    """Frequency of the dominant spectral peak of a detrended signal, with
    quadratic interpolation around the peak bin (Hann window)."""
    x = np.asarray(signal, dtype=float)
    x = x - np.mean(x)
    w = np.hanning(len(x))
    spec = np.abs(np.fft.rfft(x * w))
    freqs = np.fft.rfftfreq(len(x), d=float(t[1] - t[0]))
    valid = freqs >= f_min
    if not np.any(valid):
        raise ValueError("signal too short for the requested frequency floor")
    idx = np.argmax(spec * valid)
    if 0 < idx < len(spec) - 1 and spec[idx] > 0:
        a, b, c = spec[idx - 1], spec[idx], spec[idx + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
        return float(freqs[idx] + shift * (freqs[1] - freqs[0]))
    return float(freqs[idx])
