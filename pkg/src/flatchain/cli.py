"""Command-line front end.

Subcommands: ``tropical``, ``canon``, ``otest``, ``oreg``, ``parse``,
``aircraft stall|plan|simulate`` and ``fixtures list``.  JSON output is
deterministic (sorted keys, 12 significant digits); matrix rows/columns are
reported 1-based to match the usual mathematical labelling, systems by
variable name.  Exit codes: 0 success, 1 domain failure (e.g. a "failed"
verdict), 2 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib.resources import files as _pkg_files
from pathlib import Path

import numpy as np

from . import jets, oreg, osystem, tropical
from .aircraft.params import AircraftParams
from .aircraft.trim import TrimError, stall_analysis
from .feedback import FeedbackGains
from .planning import (
    HelixReference,
    LevelReference,
    ParabolaReference,
    PolynomialReference,
    PlanningError,
    dynamics_residual,
    flat_parametrize,
)
from .simulate import Perturbation, simulate_closed_loop


class DomainFailure(RuntimeError):
    pass


def _sig12(value):
    if isinstance(value, float):
        if value == tropical.NEG_INF:
            return "-inf"
        if math.isinf(value):
            return "inf"
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _sig12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig12(v) for v in value]
    if isinstance(value, (np.floating,)):
        return _sig12(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _emit(payload) -> None:
    print(json.dumps(_sig12(payload), sort_keys=True, separators=(", ", ": ")))


def _load_matrix(path: str) -> tropical.ExtMatrix:
    return tropical.ExtMatrix.from_text(Path(path).read_text())


def _ext(v):
    return "-inf" if v == tropical.NEG_INF else v


def cmd_tropical(args) -> int:
    A = _load_matrix(args.file)
    if A.rows <= A.cols:
        try:
            canon = tropical.minimal_canon(A)
            det = tropical.tropical_det_from_canon(A, canon)
        except tropical.NoTransversalError:
            det = tropical.NEG_INF
    else:
        det = tropical.NEG_INF
    _emit({"rows": A.rows, "cols": A.cols, "tropical_determinant": _ext(det)})
    return 0


def cmd_canon(args) -> int:
    A = _load_matrix(args.file)
    try:
        canon = tropical.minimal_canon(A)
    except (tropical.NoTransversalError, ValueError) as exc:
        _emit({"error": str(exc)})
        return 1
    cover = tropical.canon_to_cover(A, canon)
    _emit(
        {
            "lambda": list(canon.l),
            "alpha": [_ext(v) for v in cover.mu],
            "beta": [_ext(v) for v in cover.nu],
            "witness": [j + 1 for j in canon.witness],
            "tropical_determinant": _ext(tropical.tropical_det_from_canon(A, canon)),
        }
    )
    return 0


def _load_matrix_or_system(path: str):
    text = Path(path).read_text()
    if path.endswith(".dsys"):
        system = jets.parse_system(text)
        return jets.order_matrix(system), system
    return tropical.ExtMatrix.from_text(text), None


def cmd_otest(args) -> int:
    A, system = _load_matrix_or_system(args.file)
    res = osystem.o_test(A)
    names = system.variables if system else None

    def col(j):
        return names[j] if names else j + 1

    payload = {
        "status": res.status,
        "Y": sorted((col(j) for j in res.Y), key=str),
        "flat_outputs": sorted(
            (col(j) for j in range(A.cols) if j not in res.Y), key=str
        ),
        "blocks": [
            {"level": h + 1, "sigma": [i + 1 for i in blk.sigma], "xi": [col(j) for j in blk.xi]}
            for h, blk in enumerate(res.blocks)
        ],
    }
    _emit(payload)
    return 0 if res.found else 1


def cmd_oreg(args) -> int:
    system = jets.parse_system(Path(args.file).read_text())
    mapping = json.loads(args.point) if args.point else {}
    point = jets.JetPoint.from_names(system, mapping)
    res = oreg.o_reg(system, point, tol=args.tol, exact=args.exact)
    payload = {
        "status": res.status,
        "failure": res.failure,
        "Y": sorted(system.variables[j] for j in res.Y),
        "certificate": [
            {
                "level": h + 1,
                "Y1": sorted(system.variables[j] for j in lv.Y1),
                "equations": [i + 1 for i in lv.rows],
            }
            for h, lv in enumerate(res.certificate)
        ],
        "nabla": None if res.nabla is None else float(res.nabla),
    }
    _emit(payload)
    return 0 if res.found else 1


def cmd_parse(args) -> int:
    system = jets.parse_system(Path(args.file).read_text())
    A = jets.order_matrix(system)
    _emit(
        {
            "variables": list(system.variables),
            "equations": system.n_eqs,
            "order_matrix": [[_ext(v) for v in row] for row in A.entries],
        }
    )
    return 0


def _resolve_params(path_str: str, base: Path | None) -> AircraftParams:
    path = Path(path_str)
    candidates = [path]
    if base is not None:
        candidates.append(base / path)
    for cand in candidates:
        if cand.is_file():
            return AircraftParams.load(cand)
    bundled = _pkg_files("flatchain.fixtures").joinpath(path.name)
    if bundled.is_file():
        return AircraftParams.from_dict(json.loads(bundled.read_text()))
    raise FileNotFoundError(f"airframe parameter file not found: {path_str}")


def cmd_stall(args) -> int:
    params = _resolve_params(args.params, None)
    if args.rho_altitude:
        params = params.with_options(rho_altitude=True)
    try:
        res = stall_analysis(params, args.model, F_max=args.fmax)
    except TrimError as exc:
        _emit({"error": str(exc)})
        return 1
    alphas, Vs, Fs, dms = res.sweep

    def emit(handle):
        writer = csv.writer(handle)
        writer.writerow(["alpha", "V", "F", "delta_m"])
        for row in zip(alphas, Vs, Fs, dms):
            writer.writerow([f"{v:.12g}" for v in row])

    if args.out is None:
        emit(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            emit(fh)
    record = {
        "case": res.case,
        "alpha_stall": res.alpha,
        "V_stall": res.V,
        "F_stall": res.F,
        "model": args.model,
    }
    print(json.dumps(_sig12(record), sort_keys=True), file=sys.stderr)
    return 0


_REF_KINDS = {
    "helix": lambda p: HelixReference(
        speed=p.get("speed", 30.0),
        climb_rate=p.get("climb_rate", 5.0),
        t1=p.get("t_final", 30.0),
        z0=p.get("z0", 1000.0),
        output_value=p.get("output_value", 0.0),
    ),
    "parabola": lambda p: ParabolaReference(
        vx=p.get("vx_kmh", 750.0) / 3.6,
        h=p.get("h", 2000.0),
        t1=p.get("t_final", 15.0),
        output_value=p.get("output_value", 0.0),
    ),
    "level": lambda p: LevelReference(
        V=p.get("V", 50.0),
        altitude=p.get("altitude", 1000.0),
        t1=p.get("t_final", 10.0),
        output_value=p.get("output_value", 0.0),
    ),
    "custom-polynomial": lambda p: PolynomialReference(
        x_coeffs=tuple(p["x"]),
        y_coeffs=tuple(p["y"]),
        z_coeffs=tuple(p["z"]),
        w_coeffs=tuple(p["w"]),
        t1=p.get("t_final", 10.0),
    ),
}


def _load_scenario(path_str: str):
    path = Path(path_str)
    data = json.loads(path.read_text())
    params = _resolve_params(data["params_file"], path.parent)
    if data.get("rho_altitude"):
        params = params.with_options(rho_altitude=True)
    ref_cfg = dict(data["reference"])
    kind = ref_cfg.pop("kind")
    if kind not in _REF_KINDS:
        raise ValueError(f"unknown reference kind {kind!r}")
    ref = _REF_KINDS[kind](ref_cfg)
    gains = FeedbackGains(**data.get("gains", {}))
    pert_cfg = dict(data.get("perturbation", {}))
    pert_cfg.pop("kind", None)
    wind = pert_cfg.pop("wind", None) or {}
    offset = pert_cfg.pop("offset", None)
    pert = Perturbation(
        kind=data.get("perturbation", {}).get("kind", "none"),
        offset=np.asarray(offset, dtype=float) if offset is not None else None,
        engine_out=bool(pert_cfg.pop("engine_out", False)),
        wind_amplitude=float(wind.get("amplitude", 0.0)),
        wind_frequency=float(wind.get("frequency", 0.0)),
        wind_direction=wind.get("direction", "earth-y"),
    )
    integ = data.get("integrator", {})
    return {
        "params": params,
        "reference": ref,
        "output_set": data.get("output_set", "beta"),
        "gains": gains,
        "perturbation": pert,
        "model": data.get("model", "simplified"),
        "step": float(integ.get("step", 1e-3)),
        "t_final": integ.get("t_final"),
        "enforce_envelope": bool(data.get("enforce_envelope", True)),
    }


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" for v in row])


_STATE_HEADER = ["time", "x", "y", "z", "V", "gamma", "chi", "alpha", "beta", "mu", "p", "q", "r"]


def cmd_plan(args) -> int:
    sc = _load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        planned = flat_parametrize(sc["params"], sc["reference"], sc["output_set"], sc["step"])
    except PlanningError as exc:
        _emit({"error": str(exc)})
        return 1
    res = dynamics_residual(planned)
    _write_csv(
        out / "states.csv",
        _STATE_HEADER,
        (np.concatenate(([planned.t[k]], planned.states[k])) for k in range(len(planned.t))),
    )
    _write_csv(
        out / "controls.csv",
        ["time", "F", "delta_l", "delta_m", "delta_n"],
        (np.concatenate(([planned.t[k]], planned.controls[k])) for k in range(len(planned.t))),
    )
    _write_csv(
        out / "errors.csv",
        ["time", "dynamics_residual", "output_determinant"],
        (
            [planned.t[k], res[k], planned.chain["output_det"][k]]
            for k in range(len(planned.t))
        ),
    )
    summary = {
        "output_set": planned.output_set,
        "samples": len(planned.t),
        "grid_step": planned.grid_step,
        "max_dynamics_residual": float(res.max()),
        "min_abs_output_determinant": planned.min_output_det,
    }
    (out / "summary.json").write_text(json.dumps(_sig12(summary), sort_keys=True, indent=2) + "\n")
    _emit(summary)
    return 0


def cmd_simulate(args) -> int:
    sc = _load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        planned = flat_parametrize(sc["params"], sc["reference"], sc["output_set"], sc["step"])
    except PlanningError as exc:
        _emit({"error": str(exc)})
        return 1
    sim = simulate_closed_loop(
        sc["params"],
        planned,
        gains=sc["gains"],
        perturbation=sc["perturbation"],
        model=sc["model"],
        step=sc["step"],
        t_final=sc["t_final"],
        enforce_envelope=sc["enforce_envelope"],
    )
    n = len(sim.t)
    _write_csv(
        out / "states.csv",
        _STATE_HEADER + ["F"],
        (np.concatenate(([sim.t[k]], sim.states[k])) for k in range(n)),
    )
    _write_csv(
        out / "controls.csv",
        ["time", "F", "delta_l", "delta_m", "delta_n", "p_cmd", "q_cmd", "r_cmd", "Fdot_cmd"],
        (
            np.concatenate(([sim.t[k]], sim.controls[k], sim.commanded[k]))
            for k in range(n)
        ),
    )
    _write_csv(
        out / "errors.csv",
        ["time"] + [f"e_{nm}" for nm in sim.output_names],
        (np.concatenate(([sim.t[k]], sim.errors[k])) for k in range(n)),
    )
    summary = {
        "status": sim.status,
        "termination": sim.termination,
        "model": sc["model"],
        **sim.metrics,
    }
    (out / "summary.json").write_text(json.dumps(_sig12(summary), sort_keys=True, indent=2) + "\n")
    _emit(summary)
    return 0 if sim.status == "completed" else 1


def cmd_fixtures(args) -> int:
    root = _pkg_files("flatchain.fixtures")
    names = sorted(p.name for p in root.iterdir() if p.is_file())
    for name in names:
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatchain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tropical", help="tropical determinant of an order matrix")
    p.add_argument("file")
    p.set_defaults(func=cmd_tropical)

    p = sub.add_parser("canon", help="minimal canon, Jacobi cover, witness")
    p.add_argument("file")
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("otest", help="chained-structure (saddle-number-zero) test")
    p.add_argument("file", help=".mat order matrix or .dsys system")
    p.set_defaults(func=cmd_otest)

    p = sub.add_parser("oreg", help="point-regularity test of a differential system")
    p.add_argument("file", help=".dsys system file")
    p.add_argument("--point", default="{}", help='JSON like {"x5": 0, "x6": 1, "x2:1": 3}')
    p.add_argument("--tol", type=float, default=None, help="rank tolerance (default 1e-9 or FLATCHAIN_TOL)")
    p.add_argument("--exact", action="store_true", help="exact rational elimination")
    p.set_defaults(func=cmd_oreg)

    p = sub.add_parser("parse", help="parse a .dsys file and echo its order matrix")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    pa = sub.add_parser("aircraft", help="airframe analysis and trajectory tools")
    asub = pa.add_subparsers(dest="aircraft_command", required=True)

    p = asub.add_parser("stall", help="trim sweep and stall point")
    p.add_argument("--params", required=True)
    p.add_argument("--model", choices=["simplified", "full"], default="simplified")
    p.add_argument("--fmax", type=float, default=None)
    p.add_argument("--rho-altitude", action="store_true")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_stall)

    p = asub.add_parser("plan", help="flat trajectory planning")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plan)

    p = asub.add_parser("simulate", help="closed-loop simulation")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    pf = sub.add_parser("fixtures", help="bundled example files")
    fsub = pf.add_subparsers(dest="fixtures_command", required=True)
    p = fsub.add_parser("list", help="list bundled fixture files")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"flatchain: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
