"""Right-hand side of the truncated MHD-Boussinesq system.

One parameterized tendency covers the fully dissipative, non-diffusive
(kappa=0), and fully inviscid (nu=eta=kappa=0) regimes: the stiff linear
diffusion is not part of the tendency and is applied exactly by the
integrating-factor stepper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels, spectral
from .errors import BlowupError, ConfigurationError
from .spectral import TWO_PI, Grid, grid_for


@dataclass
class Params:
    """Physical constants and discretization knobs.

    nu, eta, kappa: viscosity / magnetic diffusivity / thermal diffusivity.
    g: buoyancy constant.  n: grid modes per axis.  m: Galerkin cutoff
    (defaults to floor(n/3), the dealiasing limit).  dt, t_end in simulation
    time.  blowup_ceiling bounds ||grad u||_L2 as the operational blow-up
    proxy.
    """

    nu: float = 0.0
    eta: float = 0.0
    kappa: float = 0.0
    g: float = 1.0
    n: int = 32
    m: int | None = None
    dt: float = 1e-3
    t_end: float = 1.0
    seed: int = 0
    blowup_ceiling: float = 1e6

    def __post_init__(self):
        if self.m is None:
            self.m = self.n // 3
        self.validate()

    def validate(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ConfigurationError(f"n must be a positive even integer, got {self.n}")
        for name in ("nu", "eta", "kappa"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if self.g < 0:
            raise ConfigurationError(f"g must be nonnegative, got {self.g}")
        if self.m > self.n // 3:
            raise ConfigurationError(
                f"m={self.m} exceeds the dealiased band floor(n/3)={self.n // 3}"
            )
        if self.m < 1:
            raise ConfigurationError(f"m must be at least 1, got {self.m}")
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.t_end <= 0:
            raise ConfigurationError(f"t_end must be positive, got {self.t_end}")

    @property
    def grid(self) -> Grid:
        return grid_for(self.n)


@dataclass
class State:
    """Galerkin unknown: velocity, magnetic field, temperature, clock."""

    u: np.ndarray  # (3, N, N, N) complex
    b: np.ndarray  # (3, N, N, N) complex
    theta: np.ndarray  # (N, N, N) complex
    t: float = 0.0

    @classmethod
    def zero(cls, n: int, t: float = 0.0) -> "State":
        return cls(
            u=np.zeros((3, n, n, n), dtype=np.complex128),
            b=np.zeros((3, n, n, n), dtype=np.complex128),
            theta=np.zeros((n, n, n), dtype=np.complex128),
            t=t,
        )

    @property
    def n(self) -> int:
        return self.theta.shape[-1]

    def copy(self) -> "State":
        return State(self.u.copy(), self.b.copy(), self.theta.copy(), self.t)


@dataclass
class Tendency:
    du: np.ndarray
    db: np.ndarray
    dtheta: np.ndarray


@lru_cache(maxsize=None)
def _mask_half(n: int, m: int) -> np.ndarray:
    grid = grid_for(n)
    return spectral.truncation_mask_half(grid, m) & grid.dealias_keep_h


@lru_cache(maxsize=None)
def _mask_full(n: int, m: int) -> np.ndarray:
    grid = grid_for(n)
    cube = grid.kmax <= m if m < n // 2 - 1 else np.ones_like(grid.kmax, dtype=bool)
    return cube & grid.dealias_keep


def _grad_half(fh: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral gradient of a stack of scalar half-spectrum fields.

    fh shape (..., N, N, nh) -> (3, ..., N, N, nh) with leading derivative axis.
    """
    out = np.empty((3,) + fh.shape, dtype=np.complex128)
    out[0] = (TWO_PI * 1j) * grid.k1 * fh
    out[1] = (TWO_PI * 1j) * grid.k2 * fh
    out[2] = (TWO_PI * 1j) * grid.k3h * fh
    return out


class RhsWorkspace:
    """Reusable scratch buffers for rhs_half (allocation churn is measurable
    on the hot loop)."""

    def __init__(self, n: int):
        nh = n // 2 + 1
        self.spec = np.empty((13, n, n, nh), dtype=np.complex128)
        self.flux = np.empty((9, n, n, n), dtype=np.float64)


def rhs_half(uh, bh, th, grid: Grid, g: float, m: int, want_speed: bool = False,
             work: RhsWorkspace | None = None):
    """Tendencies in the half-spectrum representation (hot path).

    Evaluated in curl form, which needs only two batched transforms: with
    omega = curl u and jcur = curl b,

        du  = P(u x omega - b x jcur) + g P(theta e3)
        db  = curl(u x b)
        dth = -div(u theta)

    For solenoidal u, b this equals the convective form after projection
    (the residual gradient terms are annihilated by P), and db, dth are
    solenoidal / mean-preserving by construction.  All quadratic products
    are dealiased and cut to max|k_i| <= m; k=0 modes of du stay zero.
    With want_speed=True also returns max |u| + |b| over the grid (for the
    advective CFL number) at no extra transform cost.
    """
    mask = _mask_half(grid.n, m)
    if work is None:
        work = RhsWorkspace(grid.n)

    spec = work.spec
    spec[0:3] = uh
    spec[3:6] = bh
    kernels.curl_half(uh, grid, out=spec[6:9])
    kernels.curl_half(bh, grid, out=spec[9:12])
    spec[12] = th
    phys = grid.phys_from_half(spec, scratch=True)

    speed, flux = kernels.rotational_terms(
        phys[0:3], phys[6:9], phys[3:6], phys[9:12], phys[12], out=work.flux
    )
    out = grid.half_from_phys(flux, scratch=True)
    out *= mask
    duh, gh, q = out[0:3], out[3:6], out[6:9]

    duh[2] += g * th
    kernels.leray_inplace(duh, grid)
    duh[:, 0, 0, 0] = 0.0

    dbh = kernels.curl_half(gh, grid)
    dthh = kernels.neg_divergence_half(q, grid)

    if want_speed:
        return duh, dbh, dthh, speed
    return duh, dbh, dthh


def _check_resolution(grid: Grid, *arrays):
    for a in arrays:
        if a.shape[-3:] != (grid.n,) * 3:
            raise ConfigurationError(
                f"field shape {a.shape} does not match resolution N={grid.n}"
            )


def advect(u: np.ndarray, v: np.ndarray, grid: Grid, m: int | None = None) -> np.ndarray:
    """Projected, dealiased advection P_sigma P_m((u.grad) v) (the bilinear term).

    u must be divergence-free.  Equals the exact truncated convolution for
    inputs supported in the dealiased band.
    """
    _check_resolution(grid, u, v)
    if m is None:
        m = grid.dealias_cut
    uh = grid.to_half(u)
    vh = grid.to_half(v)
    u_phys = grid.phys_from_half(uh)
    grad_v = grid.phys_from_half(_grad_half(vh, grid))
    zero = np.zeros_like(u_phys)
    out_phys = kernels.combine_advection(zero, grad_v, u_phys, grad_v)
    oh = grid.half_from_phys(out_phys)
    oh *= _mask_half(grid.n, m)
    kernels.leray_inplace(oh, grid)
    oh[:, 0, 0, 0] = 0.0
    out = grid.to_full(oh)
    _assert_hermitian(out)
    return out


def scalar_advect(u: np.ndarray, theta: np.ndarray, grid: Grid, m: int | None = None) -> np.ndarray:
    """Dealiased, truncated u.grad(theta); no Leray projection (scalar)."""
    _check_resolution(grid, u, theta)
    if m is None:
        m = grid.dealias_cut
    uh = grid.to_half(u)
    th = grid.to_half(theta)
    u_phys = grid.phys_from_half(uh)
    grad_t = grid.phys_from_half(_grad_half(th, grid))
    out_phys = -kernels.scalar_advection(u_phys, grad_t)
    oh = grid.half_from_phys(out_phys)
    oh *= _mask_half(grid.n, m)
    oh[0, 0, 0] = 0.0  # exact mean of u.grad(theta) is zero for solenoidal u
    out = grid.to_full(oh)
    _assert_hermitian(out)
    return out


def _assert_hermitian(f: np.ndarray, tol: float = 1e-13):
    viol = spectral.hermitian_violation(f)
    if viol > tol:
        raise AssertionError(f"nonlinear term broke Hermitian symmetry: {viol:.3e}")


def rhs(state: State, params: Params) -> Tendency:
    """Tendency of the truncated system, excluding diffusion multipliers."""
    grid = params.grid
    _check_resolution(grid, state.u, state.b, state.theta)
    for name, arr in (("u", state.u), ("b", state.b), ("theta", state.theta)):
        if not np.all(np.isfinite(arr)):
            raise BlowupError(state.t, f"non-finite coefficients in {name}")
    duh, dbh, dthh = rhs_half(
        grid.to_half(state.u), grid.to_half(state.b), grid.to_half(state.theta),
        grid, params.g, params.m,
    )
    du = grid.to_full(duh)
    db = grid.to_full(dbh)
    dtheta = grid.to_full(dthh)
    _assert_hermitian(du)
    _assert_hermitian(db)
    _assert_hermitian(dtheta)
    return Tendency(du=du, db=db, dtheta=dtheta)


def pressure_recover(state: State, params: Params) -> np.ndarray:
    """Pressure whose gradient closes the unprojected momentum tendency.

    F = -(u.grad)u + (b.grad)b + g theta e3 (dealiased, truncated, not
    projected); p solves grad p = (I - P_sigma) F, with zero mean.
    """
    grid = params.grid
    uh = grid.to_half(state.u)
    bh = grid.to_half(state.b)
    th = grid.to_half(state.theta)

    u_phys = grid.phys_from_half(uh)
    b_phys = grid.phys_from_half(bh)
    grad_u = grid.phys_from_half(_grad_half(uh, grid))
    grad_b = grid.phys_from_half(_grad_half(bh, grid))
    f_phys = kernels.combine_advection(u_phys, grad_u, b_phys, grad_b)
    fh = grid.half_from_phys(f_phys)
    fh *= _mask_half(grid.n, params.m)
    fh[2] += params.g * th

    k_dot_f = grid.k1 * fh[0] + grid.k2 * fh[1] + grid.k3h * fh[2]
    ph = (-1j / TWO_PI) * k_dot_f * grid.inv_ksq_h
    return grid.to_full(ph)
