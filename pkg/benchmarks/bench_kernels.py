"""Time the numba kernels against their numpy twins and check they agree.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

The first numba call (compilation or cache load) is excluded from timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from flplate import _kernels as kern
from flplate._accel import nb


def _best(func, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(scale, rng):
    m = int(4000 * scale)
    amp = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    omega = rng.standard_normal(m) * 5 - 0.1j * rng.random(m)
    t = np.linspace(0.01, 1.0, int(200 * scale))
    coef = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    k = np.sort(rng.random(m) * 10)
    x = np.linspace(-10, 10, int(401 * scale))
    n = int(2000 * scale)
    w = (1.0 + np.arange(n)) ** -0.5 + 0j
    b = rng.standard_normal(n) + 0j
    f = rng.standard_normal(n) + 0j
    om = rng.standard_normal(int(256 * scale)) * 20
    return [
        ("moment_sum order 0", lambda: kern.moment_sum_np(amp, omega, t, 0),
         lambda: kern._moment_sum_nb(amp, omega + 0j, t, 0)),
        ("moment_sum order 2", lambda: kern.moment_sum_np(amp, omega, t, 2),
         lambda: kern._moment_sum_nb(amp, omega + 0j, t, 2)),
        ("real_synthesis", lambda: kern.real_synthesis_np(coef, k, x),
         lambda: kern._real_synthesis_nb(coef.real.copy(), coef.imag.copy(), k, x)),
        ("toeplitz_apply", lambda: kern.toeplitz_apply_np(w, b),
         lambda: kern._toeplitz_apply_nb(w, b)),
        ("toeplitz_solve", lambda: kern.toeplitz_solve_np(w, b),
         lambda: kern._toeplitz_solve_nb(w, b)),
        ("filon_cumulative", lambda: kern.filon_cumulative_np(f, om, 1e-3),
         lambda: kern._filon_cumulative_nb(f, om + 0j, 1e-3)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--scale", type=float, default=1.0)
    args = p.parse_args(argv)
    if nb is None:
        print("numba is not installed; nothing to compare")
        return 1
    rng = np.random.default_rng(12345)
    print(f"{'kernel':<22}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max rel diff':>15}")
    for name, f_np, f_nb in cases(args.scale, rng):
        ref, got = f_np(), f_nb()
        diff = float(np.max(np.abs(ref - got)) / max(np.max(np.abs(ref)), 1e-300))
        t_np = _best(f_np, args.repeat)
        t_nb = _best(f_nb, args.repeat)
        print(f"{name:<22}{t_np:>12.4g}{t_nb:>12.4g}{t_np / t_nb:>10.1f}{diff:>15.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
