"""Airframe parameter records and JSON ingestion.

The aerodynamic model is the 45-coefficient generic nonlinear polynomial
family; geometry and inertia follow the usual plane-of-symmetry layout.
Parameter files may be written in imperial units (``units: "imperial"``,
pounds / lbf / feet) and are converted to SI on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

G0 = 9.80665
RHO0 = 1.225
LB_TO_KG = 0.45359237
LBF_TO_N = 4.4482216152605
FT_TO_M = 0.3048
SLUGFT2_TO_KGM2 = 1.3558179618926  # imperial inertia entries are slug ft^2

# air density law (troposphere): rho0 * (1 + LAPSE*z/T0)^RHO_EXP with z <= 0 aloft
LAPSE = 0.0065
T0_K = 288.15
R_AIR = 287.053
RHO_EXP = G0 / (R_AIR * LAPSE) - 1.0

N_THETA = 45

# packed layout for the numeric kernels
_IDX = {
    "m": 0, "S": 1, "span": 2, "chord": 3,
    "Ixx": 4, "Iyy": 5, "Izz": 6, "Ixz": 7,
    "y_p": 8, "eps": 9, "g": 10, "rho0": 11,
    "rho_mode": 12, "rate_mode": 13, "F_max": 14,
}
THETA0 = 15
PACKED_LEN = THETA0 + N_THETA

RHO_CONST = 0.0
RHO_ALTITUDE = 1.0
RATE_STANDARD = 0.0  # p~ = span*p/(2V), q~ = chord*q/(2V), r~ = span*r/(2V)
RATE_RAW = 1.0  # p~ = span*p, q~ = chord*q, r~ = span*r (no 2V normalization)


@dataclass(frozen=True)
class AircraftParams:
    name: str
    m: float
    S: float
    span: float  # wing span (the `a` of the moment arms)
    chord: float  # mean aerodynamic chord (the `b`)
    Ixx: float
    Iyy: float
    Izz: float
    Ixz: float
    y_p: float
    eps: float
    theta: tuple[float, ...]
    F_max: float = float("inf")
    g: float = G0
    rho0: float = RHO0
    rho_altitude: bool = False
    rate_scaling: str = "standard"  # "standard" (by 2V) | "raw"

    def __post_init__(self):
        if len(self.theta) != N_THETA:
            raise ValueError(f"theta must have {N_THETA} entries, got {len(self.theta)}")
        if min(self.m, self.S, self.span, self.chord) <= 0:
            raise ValueError("m, S, span and chord must be positive")
        if self.rate_scaling not in ("standard", "raw"):
            raise ValueError("rate_scaling must be 'standard' or 'raw'")
        J = self.inertia
        if np.any(np.linalg.eigvalsh(J) <= 0):
            raise ValueError("inertia matrix must be positive definite")

    @property
    def inertia(self) -> np.ndarray:
        return np.array(
            [
                [self.Ixx, 0.0, -self.Ixz],
                [0.0, self.Iyy, 0.0],
                [-self.Ixz, 0.0, self.Izz],
            ]
        )

    @property
    def packed(self) -> np.ndarray:
        out = np.zeros(PACKED_LEN)
        out[_IDX["m"]] = self.m
        out[_IDX["S"]] = self.S
        out[_IDX["span"]] = self.span
        out[_IDX["chord"]] = self.chord
        out[_IDX["Ixx"]] = self.Ixx
        out[_IDX["Iyy"]] = self.Iyy
        out[_IDX["Izz"]] = self.Izz
        out[_IDX["Ixz"]] = self.Ixz
        out[_IDX["y_p"]] = self.y_p
        out[_IDX["eps"]] = self.eps
        out[_IDX["g"]] = self.g
        out[_IDX["rho0"]] = self.rho0
        out[_IDX["rho_mode"]] = RHO_ALTITUDE if self.rho_altitude else RHO_CONST
        out[_IDX["rate_mode"]] = RATE_RAW if self.rate_scaling == "raw" else RATE_STANDARD
        out[_IDX["F_max"]] = self.F_max
        out[THETA0:] = self.theta
        return out

    def with_options(self, **kwargs) -> "AircraftParams":
        return replace(self, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "AircraftParams":
        d = dict(data)
        units = d.pop("units", "si").lower()
        name = d.pop("name", "unnamed")
        eps = float(d.pop("eps_deg", 0.0)) * np.pi / 180.0 if "eps_deg" in d else float(d.pop("eps", 0.0))
        theta = tuple(float(v) for v in d.pop("theta"))
        kw = dict(
            m=float(d.pop("m")),
            S=float(d.pop("S")),
            span=float(d.pop("a")) if "a" in d else float(d.pop("span")),
            chord=float(d.pop("b")) if "b" in d else float(d.pop("chord")),
            Ixx=float(d.pop("Ixx")),
            Iyy=float(d.pop("Iyy")),
            Izz=float(d.pop("Izz")),
            Ixz=float(d.pop("Ixz")),
            y_p=float(d.pop("y_p", 0.0)),
        )
        if units == "imperial":
            kw["m"] *= LB_TO_KG
            kw["S"] *= FT_TO_M**2
            kw["span"] *= FT_TO_M
            kw["chord"] *= FT_TO_M
            for key in ("Ixx", "Iyy", "Izz", "Ixz"):
                kw[key] *= SLUGFT2_TO_KGM2
            kw["y_p"] *= FT_TO_M
        fmax = d.pop("F_max", None)
        if fmax is not None:
            fmax = float(fmax) * (LBF_TO_N if units == "imperial" else 1.0)
        return cls(
            name=name,
            eps=eps,
            theta=theta,
            F_max=float("inf") if fmax is None else fmax,
            rho_altitude=bool(d.pop("rho_altitude", False)),
            rate_scaling=d.pop("rate_scaling", "standard"),
            **kw,
        )

    @classmethod
    def load(cls, path) -> "AircraftParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class AircraftState:
    """12 states: position, airspeed/path angles, attitude angles, body rates."""

    x: float = 0.0
    y: float = 0.0
    z: float = -1000.0
    V: float = 50.0
    gamma: float = 0.0
    chi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    mu: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.x, self.y, self.z, self.V, self.gamma, self.chi,
             self.alpha, self.beta, self.mu, self.p, self.q, self.r]
        )

    @classmethod
    def from_array(cls, arr) -> "AircraftState":
        return cls(*map(float, arr))


@dataclass(frozen=True)
class Controls:
    F: float
    delta_l: float = 0.0
    delta_m: float = 0.0
    delta_n: float = 0.0
    eta: float = 0.0  # differential-thrust ratio (F1 - F2) / (F1 + F2)

    def __post_init__(self):
        if abs(self.eta) > 1.0:
            raise ValueError("|eta| must not exceed 1 (single-engine limit)")

    def as_array(self) -> np.ndarray:
        return np.array([self.F, self.delta_l, self.delta_m, self.delta_n, self.eta])

    def saturated(self, params: "AircraftParams") -> list[str]:
        """Thrust-range violations, reported rather than clamped."""
        out = []
        if self.F < 0.0:
            out.append(f"F={self.F:.1f} below 0")
        if self.F > params.F_max:
            out.append(f"F={self.F:.1f} above F_max={params.F_max:.1f}")
        return out


@dataclass(frozen=True)
class ForceTorque:
    X: float
    Y: float
    Z: float
    L: float
    M: float
    N: float
    C_D: float
    C_Y: float
    C_L: float
    C_x: float
    C_y: float
    C_z: float
    C_l: float
    C_m: float
    C_n: float


def rho_at(params: AircraftParams, z: float) -> float:
    if not params.rho_altitude:
        return params.rho0
    base = 1.0 + LAPSE * z / T0_K
    return params.rho0 * base**RHO_EXP
