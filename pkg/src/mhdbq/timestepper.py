"""Fourth-order integrating-factor Runge-Kutta in the half spectrum.

The linear diffusion acts exactly through per-field exponential multipliers;
with all diffusivities zero the scheme reduces to classical RK4.  The
solenoidal constraint is re-projected after every step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels, spectral
from .dynamics import Params, RhsWorkspace, State, rhs_half
from .errors import BlowupError, ConfigurationError
from .spectral import TWO_PI, Grid


@dataclass
class StepReport:
    t_new: float
    cfl_number: float
    max_divergence_residual: float
    blowup_flag: bool = False


class Stepper:
    """Precomputed integrating factors for one (grid, params) combination."""

    def __init__(self, params: Params):
        self.params = params
        self.grid: Grid = params.grid
        self.dt = params.dt
        n, nh = self.grid.n, self.grid.nh
        lam = -(TWO_PI ** 2) * self.grid.ksq_h
        self.e_half = tuple(
            np.exp(lam * (c * 0.5 * self.dt)) if c > 0 else 1.0
            for c in (params.nu, params.eta, params.kappa)
        )
        self.e_full = tuple(
            e ** 2 if isinstance(e, np.ndarray) else 1.0 for e in self.e_half
        )
        self.two_e_half = tuple(
            2.0 * e if isinstance(e, np.ndarray) else 2.0 for e in self.e_half
        )
        self.work = RhsWorkspace(n)
        shapes = ((3, n, n, nh), (3, n, n, nh), (n, n, nh))
        self._y = tuple(np.empty(s, dtype=np.complex128) for s in shapes)
        self._s = tuple(np.empty(s, dtype=np.complex128) for s in shapes)

    def step_half(self, uh, bh, th, t):
        """One IF-RK4 step on half-spectrum fields; returns new fields + report.

        Stage combinations are evaluated in place on preallocated buffers:
        the hot loop is allocation-sensitive, and with all diffusivities zero
        the exponential multipliers degenerate to scalars.
        """
        grid, p, dt = self.grid, self.params, self.dt
        eh, ef, te = self.e_half, self.e_full, self.two_e_half
        y0 = (uh, bh, th)
        ys, ss = self._y, self._s

        *k1, speed = rhs_half(uh, bh, th, grid, p.g, p.m, want_speed=True,
                              work=self.work)
        for f, k, y, e in zip(y0, k1, ys, eh):
            np.multiply(k, 0.5 * dt, out=y)
            y += f
            if isinstance(e, np.ndarray):
                y *= e
        k2 = rhs_half(*ys, grid, p.g, p.m, work=self.work)
        for f, k, y, s, e in zip(y0, k2, ys, ss, eh):
            if isinstance(e, np.ndarray):
                np.multiply(f, e, out=y)
            else:
                np.copyto(y, f)
            np.multiply(k, 0.5 * dt, out=s)
            y += s
        k3 = rhs_half(*ys, grid, p.g, p.m, work=self.work)
        for f, k, y, s, e, e1 in zip(y0, k3, ys, ss, eh, ef):
            if isinstance(e1, np.ndarray):
                np.multiply(f, e1, out=y)
            else:
                np.copyto(y, f)
            np.multiply(k, dt, out=s)
            if isinstance(e, np.ndarray):
                s *= e
            y += s
        k4 = rhs_half(*ys, grid, p.g, p.m, work=self.work)

        # new = ef*f + dt/6*(ef*k1 + 2*eh*(k2+k3) + k4), accumulated into k2
        for f, a, b, c, d, s, e2, e1 in zip(y0, k1, k2, k3, k4, ss, te, ef):
            b += c
            b *= e2
            if isinstance(e1, np.ndarray):
                a *= e1
            b += a
            b += d
            b *= dt / 6.0
            if isinstance(e1, np.ndarray):
                np.multiply(f, e1, out=s)
                b += s
            else:
                b += f
        uh_new, bh_new, th_new = k2

        # Safety re-projection: floating-point drift of div u compounds.
        kernels.leray_inplace(uh_new, grid)
        kernels.leray_inplace(bh_new, grid)
        uh_new[:, 0, 0, 0] = 0.0
        bh_new[:, 0, 0, 0] = 0.0

        t_new = t + dt
        div_res = max(
            spectral.divergence_residual_half(uh_new, grid),
            spectral.divergence_residual_half(bh_new, grid),
        )

        # Non-finite values propagate into these reductions, so they double as
        # the finiteness check without extra full-array scans.
        grad_u = np.sqrt(spectral.grad_norm_sq_half(uh_new, grid))
        finite = (
            np.isfinite(div_res)
            and np.isfinite(grad_u)
            and bool(np.all(np.isfinite(th_new)))
        )
        if not finite:
            raise BlowupError(t_new, "non-finite coefficients after step")
        if grad_u > p.blowup_ceiling:
            raise BlowupError(t_new, f"||grad u||_L2 = {grad_u:.3e} exceeds ceiling")

        # CFL from the start-of-step velocity (free by-product of stage 1).
        cfl = float(speed * grid.n * dt)

        report = StepReport(
            t_new=t_new, cfl_number=cfl, max_divergence_residual=div_res
        )
        return uh_new, bh_new, th_new, report


@lru_cache(maxsize=8)
def _stepper_for(nu, eta, kappa, g, n, m, dt, ceiling) -> Stepper:
    return Stepper(
        Params(nu=nu, eta=eta, kappa=kappa, g=g, n=n, m=m, dt=dt,
               blowup_ceiling=ceiling)
    )


def stepper_for(params: Params) -> Stepper:
    return _stepper_for(
        params.nu, params.eta, params.kappa, params.g, params.n, params.m,
        params.dt, params.blowup_ceiling,
    )


def step(state: State, params: Params) -> tuple[State, StepReport]:
    """Advance one step of length params.dt."""
    if params.dt <= 0:
        raise ConfigurationError(f"dt must be positive, got {params.dt}")
    grid = params.grid
    st = stepper_for(params)
    uh, bh, th, report = st.step_half(
        grid.to_half(state.u), grid.to_half(state.b), grid.to_half(state.theta),
        state.t,
    )
    new = State(
        u=grid.to_full(uh), b=grid.to_full(bh), theta=grid.to_full(th),
        t=report.t_new,
    )
    return new, report


def cfl_dt(state: State, params: Params, safety: float) -> float:
    """Advective-CFL step suggestion, capped at the remaining run time."""
    if not 0.0 < safety <= 1.0:
        raise ConfigurationError(f"safety fraction must be in (0, 1], got {safety}")
    remaining = params.t_end - state.t
    grid = params.grid
    u_phys = grid.phys_from_half(grid.to_half(state.u))
    b_phys = grid.phys_from_half(grid.to_half(state.b))
    speed = np.sqrt((u_phys ** 2).sum(axis=0)) + np.sqrt((b_phys ** 2).sum(axis=0))
    vmax = float(speed.max())
    if vmax == 0.0:
        return remaining
    return min(safety / (grid.n * vmax), remaining)
