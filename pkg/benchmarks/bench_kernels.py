"""Compare the numba-compiled kernels against the pure-numpy fallback.

Runs the hot paths (12-state dynamics, the feedback's third-derivative map,
flat planning, and a closed-loop simulation window) twice in subprocesses,
once per backend, selected by the FLATCHAIN_NUMBA environment flag.

Usage: python benchmarks/bench_kernels.py [--samples 2000]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

_WORKER = """
import json, os, time
import numpy as np
from flatchain.aircraft import kernels
from flatchain.aircraft.params import AircraftParams
from flatchain.planning import HelixReference, flat_parametrize
from flatchain.simulate import simulate_closed_loop, Perturbation
from importlib.resources import files

samples = {samples}
params = AircraftParams.from_dict(json.loads(
    files("flatchain.fixtures").joinpath("skylark.json").read_text()))
pk = params.packed
kernels.warmup(pk)  # JIT compile outside the timed regions (no-op on numpy)

st = np.array([0.0, 0.0, -1000.0, 30.0, 0.05, 0.3, 0.02, 0.0, 0.1, 0.01, 0.02, 0.0])
t0 = time.perf_counter()
for _ in range(samples):
    kernels.dynamics12(pk, st, 200.0, 0.01, -0.02, 0.0, 0.0, True, 0.0, 0.0, 0.0)
dyn = (time.perf_counter() - t0) / samples

t0 = time.perf_counter()
for _ in range(samples):
    kernels.third_derivative_map(pk, 0.0, 0.0, -1000.0, 30.0, 0.05, 0.3, 0.02,
                                 0.0, 0.1, 200.0, 0.01, 0.02, 0.0, 5.0, 0)
g3 = (time.perf_counter() - t0) / samples

ref = HelixReference(t1=30.0)
t0 = time.perf_counter()
planned = flat_parametrize(params, ref, "beta", grid_step=5e-3)
plan = time.perf_counter() - t0

t0 = time.perf_counter()
simulate_closed_loop(params, planned, step=5e-3, t_final=10.0)
sim = time.perf_counter() - t0

print(json.dumps({{
    "backend": "numba" if kernels.NUMBA_ENABLED else "numpy",
    "dynamics12_us": dyn * 1e6,
    "third_derivative_map_us": g3 * 1e6,
    "plan_helix_5ms_s": plan,
    "simulate_10s_5ms_s": sim,
}}))
"""


def run(backend_flag: str, samples: int) -> dict:
    env = dict(os.environ, FLATCHAIN_NUMBA=backend_flag)
    out = subprocess.run(
        [sys.executable, "-c", _WORKER.format(samples=samples)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--samples", type=int, default=20000)
    args = parser.parse_args()
    results = [run("1", args.samples), run("0", args.samples)]
    keys = ["dynamics12_us", "third_derivative_map_us", "plan_helix_5ms_s", "simulate_10s_5ms_s"]
    header = f"{'metric':<28}" + "".join(f"{r['backend']:>14}" for r in results) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key in keys:
        vals = [r[key] for r in results]
        ratio = vals[1] / vals[0] if vals[0] else float("nan")
        print(f"{key:<28}" + "".join(f"{v:>14.3f}" for v in vals) + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
