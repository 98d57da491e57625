"""Benchmark the numba kernels against the pure-numpy fallback.

Times the batched fixture evaluations, a mini-batch gradient estimate, and a
short multi-step solver run under both backends.  The backend is fixed at
import time, so each timing runs in a child process with ZOMINIMAX_BACKEND
set explicitly.

Usage:  python benchmarks/bench_backends.py
"""

import json
import os
import subprocess
import sys

_CHILD = r"""
import json
import time

import numpy as np

import zominimax as zm
from zominimax.solvers import derive_params

def best_of(fn, repeat=5):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)

results = {"backend": zm.backend_name()}

quad = zm.make_quadratic(4, 3, tau=1.0, kappa=2.0, seed=7)
trig = zm.make_trig(4, 3, tau=1.0, kappa=2.0, seed=7)
x, y = np.ones(4), np.zeros(3)
P = x + 1e-3 * np.random.default_rng(0).standard_normal((20, 4))

# warm up JIT before timing
quad.value_batch_x(P, y)
trig.value_batch_x(P, y)

n = 50_000
results["quad_batch_x_us"] = best_of(
    lambda: [quad.value_batch_x(P, y) for _ in range(n)]
) / n * 1e6
results["trig_batch_x_us"] = best_of(
    lambda: [trig.value_batch_x(P, y) for _ in range(n)]
) / n * 1e6

def estimates():
    rng = np.random.default_rng(1)
    c = zm.OracleCounter()
    for _ in range(20_000):
        zm.estimate_gx(trig, x, y, 1e-3, 20, rng, c)

results["estimate_gx_us"] = best_of(estimates, repeat=3) / 20_000 * 1e6

params = derive_params(
    "gdmsa", ell=trig.ell, tau=trig.tau, d1=4, d2=3, eps=0.1, diameter=2.0,
    overrides=zm.Overrides(c_s=1.0, c_t=12.0),
)

def solve():
    zm.run_zo_gdmsa(trig, params, x, y, np.random.default_rng(3))

results["gdmsa_200_outer_s"] = best_of(solve, repeat=3)
print(json.dumps(results))
"""


def run_backend(flag: str) -> dict:
    env = dict(os.environ, ZOMINIMAX_BACKEND=flag)
    proc = subprocess.run(
        [sys.executable, "-c", _CHILD], env=env, capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{flag} benchmark failed:\n{proc.stderr}")
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    rows = [run_backend("numpy"), run_backend("numba")]
    keys = [k for k in rows[0] if k != "backend"]
    header = f"{'metric':<24}" + "".join(f"{r['backend']:>12}" for r in rows) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<24}" + f"{a:>12.3f}" + f"{b:>12.3f}" + f"{a / b:>10.2f}x")


if __name__ == "__main__":
    main()
