"""Dispatch layer for the pointwise hot kernels.

Prefers the compiled extension (mhdbq._speedups, built by setup.py via
Cython); falls back to vectorized numpy.  Set MHDBQ_PURE_PYTHON=1 to force
the fallback, e.g. for the benchmark comparison.
"""

import ctypes
import os

import numpy as np

from . import _kernels_np

_speedups = None
if not os.environ.get("MHDBQ_PURE_PYTHON"):
    try:
        from . import _speedups  # type: ignore[no-redef]
    except ImportError:
        _speedups = None

USING_SPEEDUPS = _speedups is not None

_M_TRIM_THRESHOLD = -1
_M_MMAP_THRESHOLD = -3


def tune_malloc() -> bool:
    """Raise glibc's mmap/trim thresholds (64 MB) so the solver's large
    transient arrays are recycled on the heap instead of being mmapped,
    zeroed, and unmapped on every allocation.  Returns False off glibc."""
    try:
        libc = ctypes.CDLL("libc.so.6")
        libc.mallopt(_M_MMAP_THRESHOLD, 1 << 26)
        libc.mallopt(_M_TRIM_THRESHOLD, 1 << 26)
        return True
    except OSError:
        return False

# Flattened broadcast wavenumber arrays for the half-spectrum Leray kernel,
# keyed by grid resolution (Grid instances are cached singletons).
_half_k_cache: dict[int, tuple] = {}


def _half_k(grid):
    entry = _half_k_cache.get(grid.n)
    if entry is None:
        shape = (grid.n, grid.n, grid.nh)
        k1 = np.broadcast_to(grid.k1, shape).astype(np.float64).ravel()
        k2 = np.broadcast_to(grid.k2, shape).astype(np.float64).ravel()
        k3 = np.broadcast_to(grid.k3h, shape).astype(np.float64).ravel()
        inv = np.ascontiguousarray(grid.inv_ksq_h).ravel()
        entry = (k1, k2, k3, inv)
        _half_k_cache[grid.n] = entry
    return entry


def combine_advection(a, grad_v, b, grad_w, out=None):
    """out[i] = sum_j ( -a[j] d_j v[i] + b[j] d_j w[i] ) on the grid."""
    if out is None:
        out = np.empty_like(a)
    if USING_SPEEDUPS:
        n = a[0].size
        _speedups.combine_advection_flat(
            a.reshape(3, n), grad_v.reshape(3, 3, n),
            b.reshape(3, n), grad_w.reshape(3, 3, n), out.reshape(3, n),
        )
        return out
    return _kernels_np.combine_advection(a, grad_v, b, grad_w, out)


def scalar_advection(a, grad_t, out=None):
    """out = -sum_j a[j] d_j theta on the grid."""
    if out is None:
        out = np.empty_like(a[0])
    if USING_SPEEDUPS:
        n = out.size
        _speedups.scalar_advection_flat(
            a.reshape(3, n), grad_t.reshape(3, n), out.reshape(n)
        )
        return out
    return _kernels_np.scalar_advection(a, grad_t, out)


def rotational_terms(u, om, b, jj, th, out=None):
    """Cross products and heat flux of the curl-form tendencies, plus max speed.

    out rows: 0-2 = u x om - b x jj, 3-5 = u x b, 6-8 = u * th.
    Returns max over the grid of |u| + |b|.
    """
    if out is None:
        out = np.empty((9,) + th.shape, dtype=np.float64)
    if USING_SPEEDUPS:
        n = th.size
        return _speedups.rotational_terms_flat(
            u.reshape(3, n), om.reshape(3, n), b.reshape(3, n),
            jj.reshape(3, n), th.reshape(n), out.reshape(9, n),
        ), out
    return _kernels_np.rotational_terms(u, om, b, jj, th, out), out


def leray_inplace(v, grid):
    """In-place Leray projection of a (3, N, N, N//2+1) half-spectrum array."""
    k1, k2, k3, inv = _half_k(grid)
    if USING_SPEEDUPS:
        _speedups.leray_inplace_flat(v.reshape(3, k1.size), k1, k2, k3, inv)
        return v
    shape = (grid.n, grid.n, grid.nh)
    return _kernels_np.leray_inplace(
        v, k1.reshape(shape), k2.reshape(shape), k3.reshape(shape), inv.reshape(shape)
    )


def curl_half(f, grid, out=None):
    """2*pi*i*(k x f) for a (3, N, N, N//2+1) half-spectrum array."""
    if out is None:
        out = np.empty_like(f)
    k1, k2, k3, _ = _half_k(grid)
    if USING_SPEEDUPS:
        _speedups.curl_flat(f.reshape(3, k1.size), k1, k2, k3,
                            out.reshape(3, k1.size))
        return out
    shape = (grid.n, grid.n, grid.nh)
    return _kernels_np.curl(
        f, k1.reshape(shape), k2.reshape(shape), k3.reshape(shape), out
    )


def neg_divergence_half(q, grid, out=None):
    """-2*pi*i*(k . q) for a (3, N, N, N//2+1) half-spectrum array."""
    if out is None:
        out = np.empty(q.shape[1:], dtype=np.complex128)
    k1, k2, k3, _ = _half_k(grid)
    if USING_SPEEDUPS:
        _speedups.neg_divergence_flat(q.reshape(3, k1.size), k1, k2, k3,
                                      out.reshape(k1.size))
        return out
    shape = (grid.n, grid.n, grid.nh)
    return _kernels_np.neg_divergence(
        q, k1.reshape(shape), k2.reshape(shape), k3.reshape(shape), out
    )
