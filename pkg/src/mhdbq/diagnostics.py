"""Scalar diagnostics: norms, energy balance, anisotropic regularity monitors,
and the discrete integration-by-parts identity residuals.

Sobolev norms use the integer-lattice weights (1+|k|^2)^s without 2*pi
factors; gradient-based quantities (dissipation, K, monitors) carry the 2*pi
of the physical derivative.  Norms of L^p type use collocation quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dc_fields

import numpy as np

from . import spectral
from .dynamics import Params, State
from .errors import ConfigurationError
from .spectral import TWO_PI, Grid, grid_for


# ---- norms ----------------------------------------------------------------


def sobolev_norm(f: np.ndarray, s: float) -> float:
    """sqrt( sum |f_hat(k)|^2 (1+|k|^2)^s ), integer-lattice convention."""
    if s < 0:
        raise ConfigurationError(f"Sobolev order must be nonnegative, got {s}")
    grid = grid_for(f.shape[-1])
    w = (1.0 + grid.ksq) ** s
    return float(np.sqrt(np.sum(w * np.abs(f) ** 2)))


def lp_norm(f: np.ndarray, p: float) -> float:
    """Grid-quadrature L^p norm of the physical field; p=inf gives the max."""
    if p < 1:
        raise ConfigurationError(f"L^p exponent must be >= 1, got {p}")
    grid = grid_for(f.shape[-1])
    vals = np.abs(grid.inverse(f))
    if np.isinf(p):
        return float(vals.max())
    return float((np.mean(vals ** p)) ** (1.0 / p))


def grad_norm_sq(f: np.ndarray) -> float:
    """Integral of |grad f|^2 (components summed over leading axes)."""
    grid = grid_for(f.shape[-1])
    return TWO_PI ** 2 * float(np.sum(grid.ksq * np.abs(f) ** 2))


def _weighted_norm_sq(f: np.ndarray, weight: np.ndarray) -> float:
    return float(np.sum(weight * np.abs(f) ** 2))


# ---- per-sample record ----------------------------------------------------


@dataclass
class DiagnosticsRecord:
    t: float
    energy: float
    dissipation: float
    buoyancy_flux: float
    k_grad: float  # ||grad u||^2 + ||grad b||^2 + ||grad theta||^2
    h1_u: float
    h1_b: float
    h1_theta: float
    h2_u: float
    h2_b: float
    h2_theta: float
    h3_u: float
    h3_b: float
    h3_theta: float
    theta_min: float
    theta_max: float
    theta_l2: float
    div_u: float
    div_b: float

    @classmethod
    def field_names(cls):
        return [f.name for f in dc_fields(cls)]


def record_from_state(state: State, params: Params) -> DiagnosticsRecord:
    grid = params.grid
    u, b, th = state.u, state.b, state.theta

    e_u = spectral.l2_norm_sq(u)
    e_b = spectral.l2_norm_sq(b)
    e_t = spectral.l2_norm_sq(th)
    energy = 0.5 * (e_u + e_b + e_t)

    gu = grad_norm_sq(u)
    gb = grad_norm_sq(b)
    gt = grad_norm_sq(th)
    dissipation = params.nu * gu + params.eta * gb + params.kappa * gt
    buoyancy_flux = params.g * spectral.l2_inner(th, u[2])

    theta_phys = grid.inverse(th)

    def hs(f, s):
        w = (1.0 + grid.ksq) ** s
        return float(np.sqrt(np.sum(w * np.abs(f) ** 2)))

    return DiagnosticsRecord(
        t=state.t,
        energy=energy,
        dissipation=dissipation,
        buoyancy_flux=buoyancy_flux,
        k_grad=gu + gb + gt,
        h1_u=hs(u, 1), h1_b=hs(b, 1), h1_theta=hs(th, 1),
        h2_u=hs(u, 2), h2_b=hs(b, 2), h2_theta=hs(th, 2),
        h3_u=hs(u, 3), h3_b=hs(b, 3), h3_theta=hs(th, 3),
        theta_min=float(theta_phys.min()),
        theta_max=float(theta_phys.max()),
        theta_l2=float(np.sqrt(e_t)),
        div_u=spectral.divergence_residual(u, grid),
        div_b=spectral.divergence_residual(b, grid),
    )


# ---- Prodi-Serrin exponent relation ---------------------------------------


def prodi_serrin_r(s: float) -> float:
    """Solve 2/r + 3/s = 3/4 + 1/(2s) for r; requires s > 10/3."""
    if s <= 10.0 / 3.0:
        raise ConfigurationError(
            f"Prodi-Serrin exponent requires s > 10/3, got s={s}"
        )
    return 2.0 / (0.75 - 2.5 / s)


# ---- running monitors -----------------------------------------------------


@dataclass
class MonitorAccumulators:
    """Sup-and-integral state for the anisotropic monitors over [t_start, t].

    j_sq combines sup_t of the horizontal-gradient L2 norms with the time
    integral of the mixed second-gradient norms; l_sq is the vertical
    analogue.  ps_* are the integrals of ||component||_{L^s}^r for the
    Prodi-Serrin hypothesis.
    """

    s: float = 4.0
    r: float = field(default=None)  # type: ignore[assignment]
    t_start: float | None = None
    t_last: float | None = None
    sup_h: float = 0.0
    sup_v: float = 0.0
    int_h: float = 0.0
    int_v: float = 0.0
    ps: np.ndarray = field(default_factory=lambda: np.zeros(4))
    _prev_int_h: float = 0.0
    _prev_int_v: float = 0.0
    _prev_ps: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        if self.r is None:
            self.r = prodi_serrin_r(self.s)

    @property
    def j_sq(self) -> float:
        return self.sup_h + self.int_h

    @property
    def l_sq(self) -> float:
        return self.sup_v + self.int_v


def update_monitors(
    acc: MonitorAccumulators, state: State, dt: float | None = None
) -> MonitorAccumulators:
    """Advance the accumulators with one trajectory sample (trapezoid rule).

    The sample spacing is taken from state.t by default; pass dt to override
    (e.g. when the caller's clock carries accumulated roundoff).
    """
    grid = grid_for(state.n)
    u, b = state.u, state.b

    kh_sq = (grid.k1 ** 2 + grid.k2 ** 2).astype(np.float64)
    kv_sq = (grid.k3 ** 2).astype(np.float64)

    # sup parts: ||grad_h .||^2 and ||d3 .||^2
    wh = TWO_PI ** 2 * kh_sq
    wv = TWO_PI ** 2 * kv_sq
    sup_h_now = _weighted_norm_sq(u, wh) + _weighted_norm_sq(b, wh)
    sup_v_now = _weighted_norm_sq(u, wv) + _weighted_norm_sq(b, wv)

    # integral parts: ||grad grad_h .||^2 and ||grad d3 .||^2
    wih = TWO_PI ** 4 * grid.ksq * kh_sq
    wiv = TWO_PI ** 4 * grid.ksq * kv_sq
    int_h_now = _weighted_norm_sq(u, wih) + _weighted_norm_sq(b, wih)
    int_v_now = _weighted_norm_sq(u, wiv) + _weighted_norm_sq(b, wiv)

    ps_now = np.array(
        [lp_norm(f, acc.s) ** acc.r for f in (u[1], u[2], b[1], b[2])]
    )

    if acc.t_start is None:
        acc.t_start = state.t
    else:
        h = dt if dt is not None else state.t - acc.t_last
        if h < 0:
            raise ConfigurationError("monitor samples must advance in time")
        acc.int_h += 0.5 * h * (acc._prev_int_h + int_h_now)
        acc.int_v += 0.5 * h * (acc._prev_int_v + int_v_now)
        acc.ps = acc.ps + 0.5 * h * (acc._prev_ps + ps_now)

    acc.sup_h = max(acc.sup_h, sup_h_now)
    acc.sup_v = max(acc.sup_v, sup_v_now)
    acc._prev_int_h = int_h_now
    acc._prev_int_v = int_v_now
    acc._prev_ps = ps_now
    acc.t_last = state.t
    return acc


# ---- energy balance and theta transport -----------------------------------


def energy_balance_residual(records: list[DiagnosticsRecord]) -> np.ndarray:
    """Central-difference dE/dt minus (buoyancy flux - dissipation).

    Returns one residual per interior sample; requires uniform spacing.
    """
    if len(records) < 3:
        raise ConfigurationError("need at least 3 records for a balance residual")
    t = np.array([r.t for r in records])
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-8, atol=1e-12):
        raise ConfigurationError("energy balance requires uniformly spaced records")
    e = np.array([r.energy for r in records])
    rhs = np.array([r.buoyancy_flux - r.dissipation for r in records])
    dedt = (e[2:] - e[:-2]) / (t[2:] - t[:-2])
    return dedt - rhs[1:-1]


@dataclass
class ThetaDriftReport:
    l2_drift: float
    min_drift: float
    max_drift: float


def theta_conservation(records: list[DiagnosticsRecord]) -> ThetaDriftReport:
    """Relative drift of ||theta||_L2 and of the extrema over the window."""
    if len(records) < 2:
        raise ConfigurationError("need at least 2 records for a drift report")
    l2 = np.array([r.theta_l2 for r in records])
    tmin = np.array([r.theta_min for r in records])
    tmax = np.array([r.theta_max for r in records])
    scale = max(abs(l2[0]), 1e-300)
    ext_scale = max(abs(tmin[0]), abs(tmax[0]), 1e-300)
    return ThetaDriftReport(
        l2_drift=float(np.abs(l2 - l2[0]).max() / scale),
        min_drift=float(np.abs(tmin - tmin[0]).max() / ext_scale),
        max_drift=float(np.abs(tmax - tmax[0]).max() / ext_scale),
    )


# ---- integration-by-parts identity residuals ------------------------------


def _padded_phys(f: np.ndarray, grid: Grid, n_fine: int) -> np.ndarray:
    """Exact values of the band-limited field on a finer grid."""
    fine = spectral.pad_spectrum(f, grid, n_fine)
    return grid_for(n_fine).inverse(fine)


def _require_solenoidal(v: np.ndarray, grid: Grid, name: str):
    if spectral.divergence_residual(v, grid) > 1e-10:
        raise ConfigurationError(f"{name} must be divergence-free")


def lemma_identity_residual_h(u: np.ndarray, grid: Grid | None = None) -> float:
    """Residual of the horizontal-advection triple-product identity.

    LHS = sum_{j,k<=2} int u_j d_j u_k Lap_h u_k
    RHS = 1/2 sum_{j,k<=2} int d_j u_k d_j u_k d3 u_3
          - int d1 u_1 d2 u_2 d3 u_3 + int d1 u_2 d2 u_1 d3 u_3
    Quadrature on a 2N grid is exact for band-limited fields; the residual is
    returned relative to the sum of term magnitudes.
    """
    if grid is None:
        grid = grid_for(u.shape[-1])
    _require_solenoidal(u, grid, "u")
    n_fine = 2 * grid.n

    u_p = _padded_phys(u, grid, n_fine)
    d = [
        _padded_phys(spectral.gradient(u[k], grid), grid, n_fine) for k in range(3)
    ]  # d[k][j] = d_j u_k on the fine grid
    lap_h = [
        _padded_phys(spectral.horizontal_laplacian(u[k], grid), grid, n_fine)
        for k in range(2)
    ]

    lhs = 0.0
    for j in range(2):
        for k in range(2):
            lhs += np.mean(u_p[j] * d[k][j] * lap_h[k])

    d3u3 = d[2][2]
    rhs = 0.0
    for j in range(2):
        for k in range(2):
            rhs += 0.5 * np.mean(d[k][j] * d[k][j] * d3u3)
    rhs -= np.mean(d[0][0] * d[1][1] * d3u3)
    rhs += np.mean(d[1][0] * d[0][1] * d3u3)

    # Normalize against the natural cubic scale so identically-vanishing
    # sides do not turn roundoff into an O(1) ratio.
    cube = grad_norm_sq(u) ** 1.5
    scale = max(abs(lhs) + abs(rhs), cube)
    if scale == 0.0:
        return 0.0
    return float(abs(lhs - rhs) / scale)


def lemma_identity_residual_pair(
    u: np.ndarray, b: np.ndarray, i: int, grid: Grid | None = None
) -> float:
    """Residual of the coupled velocity/magnetic triple-product identity.

    For direction i, both sides sum over j, k = 1..3:
    LHS = int [ u_j d_j u_k d_ii u_k - b_j d_j b_k d_ii u_k
                + u_j d_j b_k d_ii b_k - b_j d_j u_k d_ii b_k ]
    RHS = int [ -d_i u_j d_j u_k d_i u_k + d_i b_j d_j b_k d_i u_k
                - d_i u_j d_j b_k d_i b_k + d_i b_j d_j u_k d_i b_k ]
    """
    if i not in (0, 1, 2):
        raise ConfigurationError(f"axis must be 0, 1, or 2, got {i}")
    if grid is None:
        grid = grid_for(u.shape[-1])
    _require_solenoidal(u, grid, "u")
    _require_solenoidal(b, grid, "b")
    n_fine = 2 * grid.n

    u_p = _padded_phys(u, grid, n_fine)
    b_p = _padded_phys(b, grid, n_fine)
    du = [_padded_phys(spectral.gradient(u[k], grid), grid, n_fine) for k in range(3)]
    db = [_padded_phys(spectral.gradient(b[k], grid), grid, n_fine) for k in range(3)]

    w = (-TWO_PI ** 2) * {0: grid.k1, 1: grid.k2, 2: grid.k3}[i].astype(np.float64) ** 2
    dii_u = [_padded_phys(w * u[k], grid, n_fine) for k in range(3)]
    dii_b = [_padded_phys(w * b[k], grid, n_fine) for k in range(3)]

    lhs = 0.0
    rhs = 0.0
    for j in range(3):
        for k in range(3):
            lhs += np.mean(u_p[j] * du[k][j] * dii_u[k])
            lhs -= np.mean(b_p[j] * db[k][j] * dii_u[k])
            lhs += np.mean(u_p[j] * db[k][j] * dii_b[k])
            lhs -= np.mean(b_p[j] * du[k][j] * dii_b[k])
            rhs -= np.mean(du[j][i] * du[k][j] * du[k][i])
            rhs += np.mean(db[j][i] * db[k][j] * du[k][i])
            rhs -= np.mean(du[j][i] * db[k][j] * db[k][i])
            rhs += np.mean(db[j][i] * du[k][j] * db[k][i])

    cube = (grad_norm_sq(u) + grad_norm_sq(b)) ** 1.5
    scale = max(abs(lhs) + abs(rhs), cube)
    if scale == 0.0:
        return 0.0
    return float(abs(lhs - rhs) / scale)
