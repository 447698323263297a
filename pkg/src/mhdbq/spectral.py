"""Truncated Fourier representation on the unit torus [0,1]^3.

A scalar field is a complex (N, N, N) array of expansion coefficients for the
basis e^{2*pi*i k.x}, indexed in FFT order along each axis
(k = 0, 1, ..., N/2-1, -N/2, ..., -1).  Vector fields stack three components
along a leading axis, shape (3, N, N, N).  The forward transform divides by
N^3, so the k=0 coefficient is the spatial mean.

Real physical fields have Hermitian-symmetric coefficients; the module also
provides a half-spectrum (rfft) representation of shape (..., N, N, N//2+1)
used by the time-stepping hot loop, where the symmetry is structural.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.fft as sfft

from .errors import ConfigurationError, DataCorruptionError

TWO_PI = 2.0 * np.pi

# Bounded worker pool for the FFT backend; set via cli --threads.
_workers = 1


def set_fft_workers(n: int) -> None:
    global _workers
    _workers = max(1, int(n))


def get_fft_workers() -> int:
    return _workers


class Grid:
    """Precomputed wavenumbers and masks for one resolution N.

    Use grid_for(N) to obtain a cached instance.
    """

    def __init__(self, n: int):
        if n <= 0 or n % 2 != 0:
            raise ConfigurationError(f"resolution N must be a positive even integer, got {n}")
        self.n = n
        self.nh = n // 2 + 1
        k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # 0..N/2-1, -N/2..-1
        self.k1 = k.reshape(n, 1, 1)
        self.k2 = k.reshape(1, n, 1)
        self.k3 = k.reshape(1, 1, n)
        kh = k[: self.nh].copy()
        kh[-1] = -(n // 2)  # rfft stores the Nyquist plane once; sign is irrelevant for |k|
        self.k3h = kh.reshape(1, 1, self.nh)

        self.ksq = (self.k1 ** 2 + self.k2 ** 2 + self.k3 ** 2).astype(np.float64)
        self.ksq_h = (self.k1 ** 2 + self.k2 ** 2 + self.k3h ** 2).astype(np.float64)

        inv = np.zeros_like(self.ksq)
        np.divide(1.0, self.ksq, out=inv, where=self.ksq > 0)
        self.inv_ksq = inv
        inv_h = np.zeros_like(self.ksq_h)
        np.divide(1.0, self.ksq_h, out=inv_h, where=self.ksq_h > 0)
        self.inv_ksq_h = inv_h

        self.dealias_cut = n // 3
        kmax = np.maximum(np.maximum(np.abs(self.k1), np.abs(self.k2)), np.abs(self.k3))
        kmax_h = np.maximum(np.maximum(np.abs(self.k1), np.abs(self.k2)), np.abs(self.k3h))
        self.kmax = kmax
        self.kmax_h = kmax_h
        self.dealias_keep = kmax <= self.dealias_cut
        self.dealias_keep_h = kmax_h <= self.dealias_cut

        # Parseval weights for the half spectrum: interior k3 planes count twice.
        w = np.full((1, 1, self.nh), 2.0)
        w[0, 0, 0] = 1.0
        w[0, 0, -1] = 1.0
        self.half_weights = w

    # ---- transforms -------------------------------------------------------

    def forward(self, grid_values: np.ndarray) -> np.ndarray:
        """Real N^3 samples at x_j = j/N -> full coefficient array."""
        if grid_values.shape[-3:] != (self.n,) * 3:
            raise ConfigurationError(
                f"grid shape {grid_values.shape} does not match N={self.n}"
            )
        return sfft.fftn(grid_values, axes=(-3, -2, -1), norm="forward", workers=_workers)

    def inverse(self, f: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Full coefficient array -> real grid; rejects non-Hermitian input."""
        viol = hermitian_violation(f)
        if viol > tol:
            raise DataCorruptionError(
                f"Hermitian symmetry violated (relative deviation {viol:.3e})"
            )
        out = sfft.ifftn(f, axes=(-3, -2, -1), norm="forward", workers=_workers)
        return out.real.copy()

    def phys_from_half(self, h: np.ndarray, scratch: bool = False) -> np.ndarray:
        """Half-spectrum coefficients -> real grid samples.

        scratch=True allows the transform to clobber h (saves a copy when h is
        a reusable work buffer).
        """
        return sfft.irfftn(
            h, s=(self.n,) * 3, axes=(-3, -2, -1), norm="forward",
            workers=_workers, overwrite_x=scratch,
        )

    def half_from_phys(self, p: np.ndarray, scratch: bool = False) -> np.ndarray:
        return sfft.rfftn(
            p, axes=(-3, -2, -1), norm="forward", workers=_workers,
            overwrite_x=scratch,
        )

    def to_half(self, f: np.ndarray) -> np.ndarray:
        """Slice a Hermitian full array down to the rfft half spectrum."""
        return np.ascontiguousarray(f[..., : self.nh])

    def to_full(self, h: np.ndarray) -> np.ndarray:
        """Hermitian extension of a half-spectrum array to the full lattice."""
        n, nh = self.n, self.nh
        full = np.empty(h.shape[:-3] + (n, n, n), dtype=np.complex128)
        full[..., :nh] = h
        tail = np.conj(h[..., 1 : n // 2])[..., ::-1]
        tail = _negate_axis(_negate_axis(tail, -3), -2)
        full[..., nh:] = tail
        return full

    def grid_points(self):
        """Collocation coordinates x1, x2, x3, each broadcastable to (N,N,N)."""
        x = np.arange(self.n) / self.n
        return (
            x.reshape(self.n, 1, 1),
            x.reshape(1, self.n, 1),
            x.reshape(1, 1, self.n),
        )


@lru_cache(maxsize=None)
def grid_for(n: int) -> Grid:
    return Grid(n)


def _negate_axis(a: np.ndarray, axis: int) -> np.ndarray:
    """b[i] = a[(-i) mod N] along one axis."""
    return np.roll(np.flip(a, axis), 1, axis)


def hermitian_violation(f: np.ndarray) -> float:
    """Max deviation of f(-k) - conj(f(k)), relative to max(max |f|, 1).

    The unit floor keeps roundoff-level fields (max |f| comparable to machine
    epsilon) from reporting an O(1) violation.
    """
    mirror = _negate_axis(_negate_axis(_negate_axis(np.conj(f), -1), -2), -3)
    scale = max(float(np.abs(f).max()), 1.0)
    return float(np.abs(f - mirror).max() / scale)


def hermitianize(f: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian-symmetric subspace (real physical field)."""
    mirror = _negate_axis(_negate_axis(_negate_axis(np.conj(f), -1), -2), -3)
    return 0.5 * (f + mirror)


# ---- spectral calculus ----------------------------------------------------


def gradient(f: np.ndarray, grid: Grid) -> np.ndarray:
    """(3, N, N, N) array with component j = 2*pi*i*k_j * f."""
    out = np.empty((3,) + f.shape, dtype=np.complex128)
    out[0] = (TWO_PI * 1j) * grid.k1 * f
    out[1] = (TWO_PI * 1j) * grid.k2 * f
    out[2] = (TWO_PI * 1j) * grid.k3 * f
    return out


def divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    return (TWO_PI * 1j) * (grid.k1 * v[0] + grid.k2 * v[1] + grid.k3 * v[2])


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    return (-TWO_PI ** 2) * grid.ksq * f


def horizontal_laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    """The x1/x2-only part of the Laplacian."""
    return (-TWO_PI ** 2) * (grid.k1 ** 2 + grid.k2 ** 2).astype(np.float64) * f


def leray_project(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Remove the component of v parallel to k; the k=0 mode is untouched."""
    s = (grid.k1 * v[0] + grid.k2 * v[1] + grid.k3 * v[2]) * grid.inv_ksq
    out = np.empty_like(v)
    out[0] = v[0] - grid.k1 * s
    out[1] = v[1] - grid.k2 * s
    out[2] = v[2] - grid.k3 * s
    return out


def leray_project_half(v: np.ndarray, grid: Grid) -> np.ndarray:
    from . import kernels

    out = v.copy()
    kernels.leray_inplace(out, grid)
    return out


def galerkin_truncate(f: np.ndarray, grid: Grid, m: int) -> np.ndarray:
    """Zero all coefficients with max|k_i| > m (cube cutoff)."""
    if m < 0:
        raise ConfigurationError(f"Galerkin cutoff must be nonnegative, got {m}")
    if m >= grid.n // 2 - 1:
        # Cutoff at or beyond the representable band: identity.
        return f.copy()
    return np.where(grid.kmax <= m, f, 0.0)


def truncation_mask_half(grid: Grid, m: int) -> np.ndarray:
    if m >= grid.n // 2 - 1:
        return np.ones(grid.kmax_h.shape, dtype=bool)
    return grid.kmax_h <= m


def dealias(f: np.ndarray, grid: Grid) -> np.ndarray:
    """Two-thirds rule: zero modes with max|k_i| > floor(N/3)."""
    return np.where(grid.dealias_keep, f, 0.0)


def pad_spectrum(f: np.ndarray, grid: Grid, n_fine: int) -> np.ndarray:
    """Embed coefficients into a larger lattice (same field, finer grid)."""
    if n_fine < grid.n:
        raise ConfigurationError("padding target must not be smaller than N")
    if n_fine == grid.n:
        return f.copy()
    out = np.zeros(f.shape[:-3] + (n_fine,) * 3, dtype=np.complex128)
    half = grid.n // 2
    src = [slice(0, half), slice(half, grid.n)]
    dst = [slice(0, half), slice(n_fine - half, n_fine)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                out[..., dst[i], dst[j], dst[k]] = f[..., src[i], src[j], src[k]]
    return out


# ---- inner products (Parseval, coefficient convention) --------------------


def l2_inner(f: np.ndarray, g: np.ndarray) -> float:
    """Integral of f*g over the torus for real fields, from coefficients.

    Sums over all leading (component) axes as well.
    """
    return float(np.real(np.sum(f * np.conj(g))))


def l2_norm_sq(f: np.ndarray) -> float:
    return float(np.sum(np.abs(f) ** 2))


def l2_inner_half(f: np.ndarray, g: np.ndarray, grid: Grid) -> float:
    return float(np.real(np.sum(grid.half_weights * f * np.conj(g))))


def l2_norm_sq_half(f: np.ndarray, grid: Grid) -> float:
    return float(np.sum(grid.half_weights * np.abs(f) ** 2))


def grad_norm_sq_half(f: np.ndarray, grid: Grid) -> float:
    """Integral of |grad f|^2, summed over any leading component axes."""
    return TWO_PI ** 2 * float(np.sum(grid.half_weights * grid.ksq_h * np.abs(f) ** 2))


def divergence_residual_half(v: np.ndarray, grid: Grid) -> float:
    """Max |div v| coefficient relative to the field scale."""
    div = grid.k1 * v[0] + grid.k2 * v[1] + grid.k3h * v[2]
    scale = np.abs(v).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(div).max() / scale)


def divergence_residual(v: np.ndarray, grid: Grid) -> float:
    div = grid.k1 * v[0] + grid.k2 * v[1] + grid.k3 * v[2]
    scale = np.abs(v).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(div).max() / scale)
