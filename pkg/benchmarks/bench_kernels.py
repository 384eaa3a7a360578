"""Timing comparison of the compiled kernels against the pure-NumPy fallback.

Run:  python benchmarks/bench_kernels.py [--sizes 200,400,800]
"""

import argparse
import math
import time

import numpy as np

from gpswf import _kernels_py
from gpswf import specfun

try:
    from gpswf import _kernels
except ImportError:
    _kernels = None

BACKENDS = [("python", _kernels_py)]
if _kernels is not None:
    BACKENDS.insert(0, ("cython", _kernels))


def _time(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_tridiag(sizes):
    print("tridiag_eig (full spectrum + vectors)")
    rng = np.random.default_rng(0)
    for n in sizes:
        d = rng.normal(size=n)
        e = rng.normal(size=n - 1)
        row = [f"  n={n:5d}"]
        base = None
        for name, mod in BACKENDS:
            t = _time(lambda m=mod: m.tridiag_eig(d, e))
            if base is None:
                base = t
            row.append(f"{name}: {t * 1e3:9.2f} ms")
        if len(BACKENDS) == 2:
            row.append(f"speedup x{_speedup(d, e):.1f}")
        print("  ".join(row))


def _speedup(d, e):
    t_c = _time(lambda: _kernels.tridiag_eig(d, e))
    t_p = _time(lambda: _kernels_py.tridiag_eig(d, e), repeat=1)
    return t_p / t_c


def bench_series(npts=2001, m=320):
    print(f"jacobi_series (m={m} coefficients, {npts} points, 2 derivatives)")
    alpha = 0.5
    rec = specfun.jacobi_recurrence(alpha, m + 2)
    p0 = specfun.jacobi_norm0(alpha)
    coef = np.random.default_rng(1).normal(size=m)
    coef /= np.linalg.norm(coef)
    x = np.linspace(-1.0, 1.0, npts)
    for name, mod in BACKENDS:
        t = _time(lambda mm=mod: mm.jacobi_series(coef, rec, p0, x, 2))
        print(f"  {name}: {t * 1e3:9.2f} ms")


def bench_bessel(count=400, reps=200):
    print(f"bessel_ladder ({count} orders, {reps} arguments)")
    xs = np.linspace(0.5, 360.0, reps)
    for name, mod in BACKENDS:
        t = _time(lambda mm=mod: [mm.bessel_ladder(0.25, count, float(x))
                                  for x in xs])
        print(f"  {name}: {t * 1e3:9.2f} ms")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="100,200,400",
                    help="comma-separated tridiagonal sizes")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    names = ", ".join(name for name, _ in BACKENDS)
    print(f"available backends: {names}")
    bench_tridiag(sizes)
    bench_series()
    bench_bessel()


if __name__ == "__main__":
    main()
