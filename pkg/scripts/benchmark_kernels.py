#!/usr/bin/env python3
"""Time the compiled kernels against the pure-numpy fallback.

Runs the two hot loops (Mittag-Leffler power-series summation and the
Volterra product-integration march) through both backends and prints a
small table.  Handy after touching _kernels.pyx to confirm the
extension still pays for itself.

    python3 scripts/benchmark_kernels.py [--repeat 5]
"""
import argparse
import math
import time

import numpy as np

from fracrabi import _kernels_py

try:
    from fracrabi import _kernels
except ImportError:
    _kernels = None


def best_of(repeat, fn, *args):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_taylor(mod, repeat):
    cases = [(a, 1.0, math.log(r), th)
             for a in (0.4, 0.7, 1.0)
             for r in (0.5, 3.0, 12.0)
             for th in (0.0, 2.0, -1.5)]

    def run():
        for a, b, ln_r, th in cases:
            mod.ml_taylor_sum(a, b, ln_r, th)

    return best_of(repeat, run)


def bench_volterra(mod, repeat, n=512):
    from fracrabi.volterra import _starting_weights

    rng = np.random.default_rng(0)
    kmat = (rng.standard_normal((n + 1, 2, 2))
            + 1j * rng.standard_normal((n + 1, 2, 2))) * 0.1
    psi0 = np.array([1.0 + 0.0j, 0.0j])
    wcorr = _starting_weights(0.7, 5.0 / n, n, 1)
    return best_of(repeat, mod.volterra_solve, 0.7, kmat, psi0,
                   5.0 / n, 1, wcorr)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5,
                    help="best-of-N timing (default 5)")
    ap.add_argument("--n-steps", type=int, default=512,
                    help="Volterra grid size (default 512)")
    args = ap.parse_args()

    rows = []
    for label, bench in (("ml_taylor_sum x27", bench_taylor),
                         (f"volterra_solve n={args.n_steps}",
                          lambda m, r: bench_volterra(m, r, args.n_steps))):
        t_py = bench(_kernels_py, args.repeat)
        if _kernels is None:
            rows.append((label, t_py, None))
        else:
            rows.append((label, t_py, bench(_kernels, args.repeat)))

    print(f"{'kernel':<28} {'python':>10} {'compiled':>10} {'speedup':>8}")
    for label, t_py, t_c in rows:
        if t_c is None:
            print(f"{label:<28} {t_py * 1e3:>8.2f}ms {'-':>10} {'-':>8}")
        else:
            print(f"{label:<28} {t_py * 1e3:>8.2f}ms {t_c * 1e3:>8.2f}ms "
                  f"{t_py / t_c:>7.1f}x")
    if _kernels is None:
        print("compiled extension not available; showing fallback only")


if __name__ == "__main__":
    main()
