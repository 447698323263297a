"""Scripted desk-scale experiments: single runs, vanishing-diffusivity sweep,
Galerkin-cutoff convergence, and continuous dependence on initial data.

All sweeps are deterministic given seeds; cases that blow up yield flagged
partial results instead of crashing the sweep.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels, spectral
from .diagnostics import (
    DiagnosticsRecord,
    MonitorAccumulators,
    record_from_state,
    update_monitors,
)
from .dynamics import Params, State
from .errors import BlowupError, ConfigurationError
from .spectral import Grid, grid_for
from .timestepper import StepReport, stepper_for

PRESETS = ("taylor-green", "mhd-vortex", "random-sobolev")


@dataclass
class RunConfig:
    params: Params
    preset: str = "taylor-green"
    amplitude: float = 1.0
    sigma: float = 4.0
    cadence: int = 10
    snapshot_cadence: int = 0
    output_dir: str = "out"
    monitor_s: float = 4.0
    store_states: bool = False

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(
                f"unknown preset '{self.preset}'; choose from {', '.join(PRESETS)}"
            )
        n_steps = self.step_count()
        if self.cadence <= 0 or n_steps % self.cadence != 0:
            raise ConfigurationError(
                f"cadence {self.cadence} must divide the step count {n_steps}"
            )
        if self.snapshot_cadence < 0 or (
            self.snapshot_cadence and n_steps % self.snapshot_cadence != 0
        ):
            raise ConfigurationError(
                f"snapshot_cadence {self.snapshot_cadence} must divide the step count {n_steps}"
            )

    def step_count(self) -> int:
        p = self.params
        n_steps = int(round(p.t_end / p.dt))
        if n_steps < 1 or abs(n_steps * p.dt - p.t_end) > 1e-9 * max(1.0, p.t_end):
            raise ConfigurationError(
                f"t_end={p.t_end} is not an integer multiple of dt={p.dt}"
            )
        return n_steps


# ---- initial conditions ---------------------------------------------------


def random_divergence_free(
    n: int, m: int | None = None, seed: int = 0, sigma: float = 3.0
) -> np.ndarray:
    """Unit-L2 random solenoidal vector field inside the dealiased band."""
    grid = grid_for(n)
    if m is None:
        m = grid.dealias_cut
    rng = np.random.default_rng(seed)
    v = np.stack([_random_sobolev_scalar(grid, sigma, rng) for _ in range(3)])
    v = spectral.leray_project(spectral.galerkin_truncate(v, grid, m), grid)
    v[:, 0, 0, 0] = 0.0
    return _normalize_l2(v, 1.0)


def random_scalar_field(
    n: int, m: int | None = None, seed: int = 0, sigma: float = 3.0
) -> np.ndarray:
    """Unit-L2 random scalar field inside the dealiased band, zero mean."""
    grid = grid_for(n)
    if m is None:
        m = grid.dealias_cut
    rng = np.random.default_rng(seed)
    f = spectral.galerkin_truncate(_random_sobolev_scalar(grid, sigma, rng), grid, m)
    return _normalize_l2(f, 1.0)


def _normalize_l2(f: np.ndarray, target: float) -> np.ndarray:
    norm = np.sqrt(spectral.l2_norm_sq(f))
    if norm == 0.0:
        return f
    return f * (target / norm)


def _random_sobolev_scalar(grid: Grid, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Coefficients with magnitude (1+|k|^2)^(-sigma/2) and random phases."""
    n = grid.n
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(n, n, n))
    f = (1.0 + grid.ksq) ** (-sigma / 2.0) * np.exp(1j * phases)
    f = spectral.hermitianize(f)
    f[0, 0, 0] = 0.0
    return f


def make_initial_condition(config: RunConfig) -> State:
    """Build a valid State for the named preset.

    taylor-green: single-scale cellular velocity, b = theta = 0.
    mhd-vortex: orthogonal-phase single-mode velocity and magnetic fields.
    random-sobolev: all seven components with spectra ~ (1+|k|^2)^(-sigma/2),
    each field scaled to L2 norm = amplitude; deterministic given seed.
    """
    p = config.params
    grid = p.grid
    amp = config.amplitude
    state = State.zero(p.n)

    if config.preset == "taylor-green":
        x1, x2, x3 = grid.grid_points()
        u = np.zeros((3, p.n, p.n, p.n))
        u[0] = amp * np.cos(2 * np.pi * x1) * np.sin(2 * np.pi * x2) * np.sin(2 * np.pi * x3)
        u[1] = -amp * np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * x2) * np.sin(2 * np.pi * x3)
        state.u = grid.forward(u)
    elif config.preset == "mhd-vortex":
        x1, x2, _ = grid.grid_points()
        u = np.zeros((3, p.n, p.n, p.n))
        b = np.zeros((3, p.n, p.n, p.n))
        u[0] = -amp * np.sin(2 * np.pi * x2)
        u[1] = amp * np.sin(2 * np.pi * x1)
        b[0] = -amp * np.cos(2 * np.pi * x2)
        b[1] = amp * np.cos(2 * np.pi * x1)
        state.u = grid.forward(u)
        state.b = grid.forward(b)
    else:  # random-sobolev
        rng = np.random.default_rng(p.seed)
        u = np.stack([_random_sobolev_scalar(grid, config.sigma, rng) for _ in range(3)])
        b = np.stack([_random_sobolev_scalar(grid, config.sigma, rng) for _ in range(3)])
        th = _random_sobolev_scalar(grid, config.sigma, rng)
        state.u = _normalize_l2(spectral.leray_project(u, grid), amp)
        state.b = _normalize_l2(spectral.leray_project(b, grid), amp)
        state.theta = _normalize_l2(th, amp)

    state.u = spectral.galerkin_truncate(state.u, grid, p.m)
    state.b = spectral.galerkin_truncate(state.b, grid, p.m)
    state.theta = spectral.galerkin_truncate(state.theta, grid, p.m)
    state.u = spectral.leray_project(state.u, grid)
    state.b = spectral.leray_project(state.b, grid)
    state.u[:, 0, 0, 0] = 0.0
    state.b[:, 0, 0, 0] = 0.0
    return state


# ---- single trajectory ----------------------------------------------------


@dataclass
class MonitorSample:
    t: float
    j_sq: float
    l_sq: float
    ps: np.ndarray


@dataclass
class Trajectory:
    records: list[DiagnosticsRecord]
    monitor_samples: list[MonitorSample]
    final_state: State
    states: list[State] = field(default_factory=list)
    reports: list[StepReport] = field(default_factory=list)
    blown_up: bool = False
    blowup_time: float | None = None
    wall_time: float = 0.0


def run_simulation(
    config: RunConfig,
    initial_state: State | None = None,
    snapshot_writer=None,
) -> Trajectory:
    """Advance the configured run to t_end or blow-up.

    Emits a diagnostics record and monitor sample at every cadence step.
    snapshot_writer(state), when given, is called at the snapshot cadence.
    """
    kernels.tune_malloc()
    p = config.params
    grid = p.grid
    state = initial_state.copy() if initial_state is not None else make_initial_condition(config)
    n_steps = config.step_count()
    stepper = stepper_for(p)

    acc = MonitorAccumulators(s=config.monitor_s)
    traj = Trajectory(records=[], monitor_samples=[], final_state=state)
    t0 = time.perf_counter()

    def sample(st: State):
        traj.records.append(record_from_state(st, p))
        update_monitors(acc, st)
        traj.monitor_samples.append(
            MonitorSample(t=st.t, j_sq=acc.j_sq, l_sq=acc.l_sq, ps=acc.ps.copy())
        )
        if config.store_states:
            traj.states.append(st.copy())

    sample(state)
    if snapshot_writer is not None and config.snapshot_cadence:
        snapshot_writer(state)

    uh = grid.to_half(state.u)
    bh = grid.to_half(state.b)
    th = grid.to_half(state.theta)
    t = state.t

    try:
        for i in range(1, n_steps + 1):
            uh, bh, th, report = stepper.step_half(uh, bh, th, t)
            t = state.t + i * p.dt  # avoid accumulating roundoff in t
            traj.reports.append(report)
            if i % config.cadence == 0 or i == n_steps:
                st = State(grid.to_full(uh), grid.to_full(bh), grid.to_full(th), t)
                sample(st)
                traj.final_state = st
                if (
                    snapshot_writer is not None
                    and config.snapshot_cadence
                    and i % config.snapshot_cadence == 0
                ):
                    snapshot_writer(st)
    except BlowupError as exc:
        traj.blown_up = True
        traj.blowup_time = exc.t
        traj.final_state = State(grid.to_full(uh), grid.to_full(bh), grid.to_full(th), t)

    traj.wall_time = time.perf_counter() - t0
    return traj


# ---- sweeps ---------------------------------------------------------------


@dataclass
class SweepResult:
    kind: str
    labels: list[float]
    errors: list[float]
    blown_up: list[bool]
    fitted_order: float | None
    order_stderr: float | None
    wall_times: list[float]
    extra: dict = field(default_factory=dict)


def _fit_loglog(x, y):
    """Least-squares slope of log y against log x, with a standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if keep.sum() < 2:
        return None, None
    lx, ly = np.log(x[keep]), np.log(y[keep])
    if keep.sum() == 2:
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), None
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    return float(coef[0]), float(np.sqrt(cov[0, 0]))


def _state_distance_sq(a: State, b: State) -> float:
    return (
        spectral.l2_norm_sq(a.u - b.u)
        + spectral.l2_norm_sq(a.b - b.b)
        + spectral.l2_norm_sq(a.theta - b.theta)
    )


def kappa_sweep(config: RunConfig, kappas: list[float]) -> SweepResult:
    """Error of kappa > 0 runs against the kappa = 0 reference at matched times."""
    base = replace(config, store_states=True)
    ref_cfg = replace(base, params=replace(config.params, kappa=0.0))
    ic = make_initial_condition(ref_cfg)
    ref = run_simulation(ref_cfg, initial_state=ic)
    if ref.blown_up:
        raise BlowupError(ref.blowup_time, "kappa=0 reference run blew up")

    labels, errors, blown, walls = [], [], [], []
    for kappa in kappas:
        cfg = replace(base, params=replace(config.params, kappa=float(kappa)))
        traj = run_simulation(cfg, initial_state=ic)
        labels.append(float(kappa))
        walls.append(traj.wall_time)
        blown.append(traj.blown_up)
        if traj.blown_up:
            errors.append(float("nan"))
            continue
        e = max(
            np.sqrt(_state_distance_sq(s, r)) for s, r in zip(traj.states, ref.states)
        )
        errors.append(float(e))

    fit_x = [l for l, e, bl in zip(labels, errors, blown) if not bl and e > 0]
    fit_y = [e for l, e, bl in zip(labels, errors, blown) if not bl and e > 0]
    order, stderr = _fit_loglog(fit_x, fit_y)
    ordered = sorted(
        [(l, e) for l, e, bl in zip(labels, errors, blown) if not bl], reverse=True
    )
    monotone = all(e1 >= e2 for (_, e1), (_, e2) in zip(ordered, ordered[1:]))
    return SweepResult(
        kind="kappa",
        labels=labels,
        errors=errors,
        blown_up=blown,
        fitted_order=order,
        order_stderr=stderr,
        wall_times=walls,
        extra={"monotone_decreasing": monotone, "reference_kappa": 0.0},
    )


def galerkin_convergence(config: RunConfig, cutoffs: list[int]) -> SweepResult:
    """L2 distance at t_end against the largest-cutoff reference (shared grid)."""
    if len(cutoffs) < 3:
        raise ConfigurationError("need at least 3 cutoffs for a convergence fit")
    cutoffs = sorted(int(m) for m in cutoffs)
    m_ref = cutoffs[-1]
    grid = config.params.grid

    ref_cfg = replace(config, params=replace(config.params, m=m_ref))
    ic = make_initial_condition(ref_cfg)
    ref = run_simulation(ref_cfg, initial_state=ic)
    if ref.blown_up:
        raise BlowupError(ref.blowup_time, "reference cutoff run blew up")

    labels, errors, blown, walls = [], [], [], []
    for m in cutoffs[:-1]:
        cfg = replace(config, params=replace(config.params, m=m))
        ic_m = State(
            u=spectral.galerkin_truncate(ic.u, grid, m),
            b=spectral.galerkin_truncate(ic.b, grid, m),
            theta=spectral.galerkin_truncate(ic.theta, grid, m),
            t=ic.t,
        )
        traj = run_simulation(cfg, initial_state=ic_m)
        labels.append(float(m))
        walls.append(traj.wall_time)
        blown.append(traj.blown_up)
        if traj.blown_up:
            errors.append(float("nan"))
        else:
            errors.append(float(np.sqrt(_state_distance_sq(traj.final_state, ref.final_state))))

    fit_x = [l for l, e, bl in zip(labels, errors, blown) if not bl and e > 0]
    fit_y = [e for l, e, bl in zip(labels, errors, blown) if not bl and e > 0]
    order, stderr = _fit_loglog(fit_x, fit_y)
    if order is not None:
        order = -order  # report decay order as a positive number
    monotone = all(e1 >= e2 for e1, e2 in zip(errors, errors[1:]))
    return SweepResult(
        kind="galerkin",
        labels=labels,
        errors=errors,
        blown_up=blown,
        fitted_order=order,
        order_stderr=stderr,
        wall_times=walls,
        extra={
            "reference_cutoff": m_ref,
            "monotone_decreasing": monotone,
            "squared_error_order": None if order is None else 2.0 * order,
        },
    )


def continuous_dependence(config: RunConfig, deltas: list[float]) -> SweepResult:
    """Growth of the squared L2 distance X(t) under initial perturbations."""
    base = replace(config, store_states=True)
    ic = make_initial_condition(base)
    ref = run_simulation(base, initial_state=ic)
    if ref.blown_up:
        raise BlowupError(ref.blowup_time, "unperturbed base run blew up")

    grid = config.params.grid
    rng = np.random.default_rng(config.params.seed + 7919)
    direction = np.stack(
        [_random_sobolev_scalar(grid, config.sigma, rng) for _ in range(3)]
    )
    direction = spectral.leray_project(
        spectral.galerkin_truncate(direction, grid, config.params.m), grid
    )
    direction = _normalize_l2(direction, 1.0)

    labels, growth, blown, walls = [], [], [], []
    x_series = {}
    for delta in deltas:
        ic_d = ic.copy()
        if delta != 0:
            ic_d.u = spectral.leray_project(ic.u + float(delta) * direction, grid)
            ic_d.u[:, 0, 0, 0] = 0.0
        traj = run_simulation(base, initial_state=ic_d)
        labels.append(float(delta))
        walls.append(traj.wall_time)
        blown.append(traj.blown_up)
        if traj.blown_up:
            growth.append(float("nan"))
            continue
        x = np.array(
            [_state_distance_sq(s, r) for s, r in zip(traj.states, ref.states)]
        )
        x_series[float(delta)] = x
        if delta == 0:
            growth.append(0.0 if x.max() == 0.0 else float("inf"))
        elif x[0] == 0.0:
            raise ConfigurationError(
                f"perturbation delta={delta:g} left the initial data unchanged"
            )
        else:
            growth.append(float(np.sqrt(x.max() / x[0])))

    return SweepResult(
        kind="depend",
        labels=labels,
        errors=growth,
        blown_up=blown,
        fitted_order=None,
        order_stderr=None,
        wall_times=walls,
        extra={"x_series": x_series},
    )
