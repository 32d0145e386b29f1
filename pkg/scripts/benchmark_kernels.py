#!/usr/bin/env python3
"""Benchmark the compiled series kernel against the pure-Python fallback.

Times htilde_series on a mix of easy (well-separated radii) and hard
(near-diagonal, thin annulus, large lambda) inputs, and cross-checks that
both backends agree to ~1e-13 relative.

Usage: python3 scripts/benchmark_kernels.py [--repeat N]
"""

import argparse
import math
import time

from concentra.greens import _kernels_py

try:
    from concentra.greens import _speedups
except ImportError:
    _speedups = None

CASES = [
    # (label, lam, a, r, s, costh)
    ("ball, mid radius", 5.0, 0.0, 0.3, 0.5, 0.2),
    ("ball, near boundary", 5.0, 0.0, 0.9, 0.92, 0.95),
    ("annulus a=0.3, easy", 10.0, 0.3, 0.5, 0.7, -0.4),
    ("annulus a=0.5, near diag", 50.0, 0.5, 0.74, 0.75, 0.999),
    ("annulus a=0.9, lam=300", 300.0, 0.9, 0.93, 0.96, 0.5),
    ("annulus a=0.9, lam=438", 438.5, 0.9, 0.949, 0.950, 0.99),
]

TOL = 1e-12
LMAX = 10_000


def bench(fn, case, repeat):
    _, lam, a, r, s, costh = case
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(lam, a, r, s, costh, TOL, LMAX)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=20,
                    help="timing repetitions per case (best-of)")
    args = ap.parse_args()

    if _speedups is None:
        print("compiled kernel not built; timing pure Python only")
    header = f"{'case':<28}{'pure (ms)':>12}{'compiled (ms)':>15}" \
             f"{'speedup':>10}{'rel diff':>12}"
    print(header)
    print("-" * len(header))
    for case in CASES:
        (v_py, L, _, _), t_py = bench(_kernels_py.htilde_series, case,
                                      args.repeat)
        if _speedups is not None:
            (v_c, _, _, _), t_c = bench(_speedups.htilde_series, case,
                                        args.repeat)
            rel = abs(v_c - v_py) / max(1.0, abs(v_py))
            print(f"{case[0]:<28}{1e3 * t_py:>12.3f}{1e3 * t_c:>15.3f}"
                  f"{t_py / t_c:>10.1f}{rel:>12.1e}  (L={L})")
        else:
            print(f"{case[0]:<28}{1e3 * t_py:>12.3f}{'-':>15}{'-':>10}"
                  f"{'-':>12}  (L={L})")


if __name__ == "__main__":
    main()
