"""Benchmark the compiled pointwise kernels against the numpy fallback.

Run as: python benchmarks/bench_kernels.py [N ...]

Times the three hot pointwise operations (rotational cross-product terms,
spectral curl, Leray projection) and one full tendency evaluation with each
backend.  The FFTs are shared between backends, so the full-tendency rows
mostly show how much of the evaluation the pointwise work accounts for.
"""

import sys
import time

import numpy as np

from mhdbq import _kernels_np, kernels
from mhdbq.dynamics import Params, RhsWorkspace, rhs_half
from mhdbq.experiments import random_divergence_free, random_scalar_field
from mhdbq.spectral import grid_for

try:
    from mhdbq import _speedups
except ImportError:
    _speedups = None


def _best_of(fn, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3  # ms


def bench_pointwise(n):
    grid = grid_for(n)
    rng = np.random.default_rng(0)
    u, om, b, jj = (rng.standard_normal((3, n, n, n)) for _ in range(4))
    th = rng.standard_normal((n, n, n))
    out = np.empty((9, n, n, n))
    v = (rng.standard_normal((3, n, n, grid.nh))
         + 1j * rng.standard_normal((3, n, n, grid.nh)))
    curl_out = np.empty_like(v)
    k1, k2, k3, inv = kernels._half_k(grid)
    shape = (n, n, grid.nh)
    kb = [k.reshape(shape) for k in (k1, k2, k3)]

    rows = []
    rows.append((
        "rotational_terms",
        _best_of(lambda: _kernels_np.rotational_terms(u, om, b, jj, th, out)),
        None if _speedups is None else _best_of(
            lambda: _speedups.rotational_terms_flat(
                u.reshape(3, -1), om.reshape(3, -1), b.reshape(3, -1),
                jj.reshape(3, -1), th.reshape(-1), out.reshape(9, -1))),
    ))
    rows.append((
        "curl",
        _best_of(lambda: _kernels_np.curl(v, *kb, curl_out)),
        None if _speedups is None else _best_of(
            lambda: _speedups.curl_flat(
                v.reshape(3, -1), k1, k2, k3, curl_out.reshape(3, -1))),
    ))
    rows.append((
        "leray",
        _best_of(lambda: _kernels_np.leray_inplace(
            v, *kb, inv.reshape(shape))),
        None if _speedups is None else _best_of(
            lambda: _speedups.leray_inplace_flat(
                v.reshape(3, -1), k1, k2, k3, inv)),
    ))
    return rows


def bench_rhs(n):
    grid = grid_for(n)
    p = Params(nu=0.0, eta=0.0, kappa=0.0, n=n, t_end=1.0)
    uh = grid.to_half(random_divergence_free(n, seed=1))
    bh = grid.to_half(random_divergence_free(n, seed=2))
    th = grid.to_half(random_scalar_field(n, seed=3))
    work = RhsWorkspace(n)
    return _best_of(lambda: rhs_half(uh, bh, th, grid, 1.0, p.m, work=work))


def main():
    kernels.tune_malloc()
    sizes = [int(a) for a in sys.argv[1:]] or [32, 64]
    if _speedups is None:
        print("compiled extension not available; showing numpy fallback only")
    for n in sizes:
        print(f"\nN = {n}")
        print(f"  {'kernel':<18} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}")
        for name, t_np, t_cy in bench_pointwise(n):
            if t_cy is None:
                print(f"  {name:<18} {t_np:>12.3f} {'-':>14} {'-':>9}")
            else:
                print(f"  {name:<18} {t_np:>12.3f} {t_cy:>14.3f} {t_np / t_cy:>8.1f}x")
        print(f"  full tendency ({'compiled' if kernels.USING_SPEEDUPS else 'numpy'}):"
              f" {bench_rhs(n):.2f} ms")


if __name__ == "__main__":
    main()
