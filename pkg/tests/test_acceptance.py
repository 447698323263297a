"""Acceptance gate: ten numbered criteria, each printing one PASS/FAIL line.

Every criterion pins its own resolution, time step, horizon, and tolerance;
together they exercise the operator identities, conservation structure,
convergence rates, and the I/O and CLI surface at desk scale.
"""

import time

import numpy as np
import pytest

from mhdbq import diagnostics, io as mio, spectral
from mhdbq.cli import main as cli_main
from mhdbq.diagnostics import (
    energy_balance_residual,
    lemma_identity_residual_h,
    lemma_identity_residual_pair,
    prodi_serrin_r,
    theta_conservation,
)
from mhdbq.dynamics import Params, State, advect
from mhdbq.errors import ConfigurationError
from mhdbq.experiments import (
    RunConfig,
    continuous_dependence,
    galerkin_convergence,
    kappa_sweep,
    make_initial_condition,
    random_divergence_free,
    random_scalar_field,
    run_simulation,
)
from mhdbq.spectral import grid_for
from mhdbq.timestepper import step


def _report(capsys, num, name, passed, detail, t0, limit):
    elapsed = time.perf_counter() - t0
    in_time = elapsed < limit
    ok = passed and in_time
    line = (
        f"criterion {num:02d} [{'PASS' if ok else 'FAIL'}] {name}: "
        f"{detail} [{elapsed:.1f}s / limit {limit:.0f}s]"
    )
    with capsys.disabled():
        print(line)
    assert ok, line


def _total_energy(st: State) -> float:
    return (
        spectral.l2_norm_sq(st.u)
        + spectral.l2_norm_sq(st.b)
        + spectral.l2_norm_sq(st.theta)
    )


def test_criterion_01_operator_identities(capsys):
    """Advection pairing <B(u,v),v> = 0 and skew-symmetry on 50 random
    divergence-free pairs at N=16, relative tolerance 1e-12."""
    t0 = time.perf_counter()
    grid = grid_for(16)
    worst_pair = 0.0
    worst_skew = 0.0
    for case in range(50):
        u = random_divergence_free(16, seed=1000 + 3 * case)
        v = random_divergence_free(16, seed=1001 + 3 * case)
        w = random_divergence_free(16, seed=1002 + 3 * case)
        adv_v = advect(u, v, grid)
        scale = (
            np.sqrt(spectral.l2_norm_sq(u))
            * np.sqrt(diagnostics.grad_norm_sq(v))
            * np.sqrt(spectral.l2_norm_sq(v))
        )
        worst_pair = max(worst_pair, abs(spectral.l2_inner(adv_v, v)) / scale)
        skew = spectral.l2_inner(adv_v, w) + spectral.l2_inner(advect(u, w, grid), v)
        skew_scale = np.sqrt(spectral.l2_norm_sq(u)) * (
            np.sqrt(diagnostics.grad_norm_sq(v)) * np.sqrt(spectral.l2_norm_sq(w))
            + np.sqrt(diagnostics.grad_norm_sq(w)) * np.sqrt(spectral.l2_norm_sq(v))
        )
        worst_skew = max(worst_skew, abs(skew) / skew_scale)
    worst = max(worst_pair, worst_skew)
    _report(
        capsys, 1, "discrete operator identities",
        worst <= 1e-12,
        f"max relative residual {worst:.2e} (tol 1e-12, 50 pairs, N=16)",
        t0, 10.0,
    )


def test_criterion_02_triple_product_residuals(capsys):
    """Triple-product quadrature identities on 20 random divergence-free
    fields at N=16, relative residual <= 1e-11."""
    t0 = time.perf_counter()
    worst = 0.0
    fields = [random_divergence_free(16, seed=2000 + i) for i in range(20)]
    for f in fields:
        worst = max(worst, lemma_identity_residual_h(f))
    for i in range(0, 20, 2):
        worst = max(
            worst,
            lemma_identity_residual_pair(fields[i], fields[i + 1], (i // 2) % 3),
        )
    _report(
        capsys, 2, "triple-product quadrature identities",
        worst <= 1e-11,
        f"max relative residual {worst:.2e} (tol 1e-11, 20 fields, N=16)",
        t0, 10.0,
    )


def test_criterion_03_energy_identity(capsys):
    """Inviscid g=0 at N=32, dt=1e-3, T=1: relative total-energy drift
    <= 1e-8.  Diffusive g=0: the central-difference balance residual is
    sampling-limited, shrinking ~4x when the sample spacing halves."""
    t0 = time.perf_counter()

    cfg = RunConfig(
        params=Params(nu=0.0, eta=0.0, kappa=0.0, g=0.0, n=32, dt=1e-3,
                      t_end=1.0, seed=42),
        preset="random-sobolev", amplitude=0.3, sigma=4.0, cadence=1000,
    )
    ic = make_initial_condition(cfg)
    traj = run_simulation(cfg, initial_state=ic)
    assert not traj.blown_up
    e0 = _total_energy(ic)
    drift = abs(_total_energy(traj.final_state) - e0) / e0

    def diffusive_residual(dt):
        c = RunConfig(
            params=Params(nu=0.05, eta=0.04, kappa=0.03, g=0.0, n=16, dt=dt,
                          t_end=0.2, seed=7),
            preset="random-sobolev", amplitude=0.3, sigma=4.0, cadence=1,
        )
        tr = run_simulation(c)
        assert not tr.blown_up
        return float(np.abs(energy_balance_residual(tr.records)).max())

    r1 = diffusive_residual(2e-3)
    r2 = diffusive_residual(1e-3)
    ratio = r1 / r2
    _report(
        capsys, 3, "energy identity",
        drift <= 1e-8 and 2.5 <= ratio <= 6.0,
        f"inviscid drift {drift:.2e} (tol 1e-8); diffusive residual ratio "
        f"{ratio:.2f} for dt halving (expected ~4, window [2.5, 6])",
        t0, 120.0,
    )


def test_criterion_04_theta_transport_conservation(capsys):
    """kappa=0: ||theta||_L2 relative drift <= 1e-8 over unit time."""
    t0 = time.perf_counter()
    cfg = RunConfig(
        params=Params(nu=0.01, eta=0.01, kappa=0.0, g=1.0, n=16, dt=2e-3,
                      t_end=1.0, seed=11),
        preset="random-sobolev", amplitude=0.3, sigma=4.0, cadence=50,
    )
    traj = run_simulation(cfg)
    assert not traj.blown_up
    drift = theta_conservation(traj.records).l2_drift
    _report(
        capsys, 4, "theta transport conservation",
        drift <= 1e-8,
        f"relative L2 drift {drift:.2e} over T=1 (tol 1e-8)",
        t0, 60.0,
    )


def test_criterion_05_galerkin_cauchy_rate(capsys):
    """Cutoffs {4,8,16} against the M=32 reference on a shared N=96 grid,
    sigma=4 random data, inviscid, T=0.25: fitted order of the squared
    error at least 3 (tolerance -0.3)."""
    t0 = time.perf_counter()
    cfg = RunConfig(
        params=Params(nu=0.0, eta=0.0, kappa=0.0, g=1.0, n=96, dt=0.0125,
                      t_end=0.25, seed=23),
        preset="random-sobolev", amplitude=0.2, sigma=4.0, cadence=20,
    )
    result = galerkin_convergence(cfg, [4, 8, 16, 32])
    assert not any(result.blown_up)
    order2 = result.extra["squared_error_order"]
    _report(
        capsys, 5, "Galerkin Cauchy rate",
        order2 >= 2.7 and result.extra["monotone_decreasing"],
        f"squared-error order {order2:.2f} (needed >= 2.7), errors "
        + "/".join(f"{e:.1e}" for e in result.errors),
        t0, 300.0,
    )


def test_criterion_06_kappa_to_zero_convergence(capsys):
    """kappa in {1e-1, 1e-2, 1e-3} against kappa=0 at N=32, T=0.5: the
    trajectory error decreases strictly across the sweep."""
    t0 = time.perf_counter()
    cfg = RunConfig(
        params=Params(nu=0.01, eta=0.01, kappa=0.0, g=1.0, n=32, dt=2.5e-3,
                      t_end=0.5, seed=31),
        preset="random-sobolev", amplitude=0.3, sigma=4.0, cadence=50,
    )
    result = kappa_sweep(cfg, [1e-1, 1e-2, 1e-3])
    assert not any(result.blown_up)
    e = result.errors
    strict = e[0] > e[1] > e[2] > 0
    _report(
        capsys, 6, "vanishing thermal diffusivity",
        strict,
        "errors " + " > ".join(f"{x:.3e}" for x in e)
        + f" (strictly decreasing: {strict})",
        t0, 300.0,
    )


def test_criterion_07_continuous_dependence(capsys):
    """delta=0 reproduces the base run exactly (X == 0); the growth factor
    max sqrt(X)/sqrt(X(0)) agrees within 10% between delta=1e-3 and 1e-4."""
    t0 = time.perf_counter()
    cfg = RunConfig(
        params=Params(nu=0.01, eta=0.01, kappa=0.0, g=1.0, n=16, dt=2e-3,
                      t_end=0.5, seed=43),
        preset="random-sobolev", amplitude=0.3, sigma=4.0, cadence=25,
    )
    result = continuous_dependence(cfg, [0.0, 1e-3, 1e-4])
    assert not any(result.blown_up)
    unique = result.errors[0] == 0.0 and np.all(result.extra["x_series"][0.0] == 0.0)
    g1, g2 = result.errors[1], result.errors[2]
    agree = abs(g1 / g2 - 1.0) <= 0.10
    _report(
        capsys, 7, "continuous dependence on data",
        unique and agree,
        f"delta=0 exact: {unique}; growth {g1:.4f} vs {g2:.4f}, "
        f"mismatch {abs(g1 / g2 - 1.0):.1%} (tol 10%)",
        t0, 180.0,
    )


def test_criterion_08_prodi_serrin_relation(capsys):
    """Exponent relation: r(4) = 16 exactly, rejection at s = 10/3, and
    r(s) -> 8/3 as s grows."""
    t0 = time.perf_counter()
    exact = prodi_serrin_r(4.0) == 16.0
    rejected = False
    try:
        prodi_serrin_r(10.0 / 3.0)
    except ConfigurationError:
        rejected = True
    # at s = 1e6 the relation itself puts r exactly 2/(3/4 - 2.5e-6);
    # check the computed value against that closed form, and the 1e-6
    # limit tolerance at s = 1e7 where the relation allows it
    dev6 = abs(prodi_serrin_r(1e6) - 2.0 / (0.75 - 2.5e-6))
    limit = abs(prodi_serrin_r(1e7) - 8.0 / 3.0)
    ok = exact and rejected and dev6 < 1e-12 and limit < 1e-6
    _report(
        capsys, 8, "regularity-criterion exponent relation",
        ok,
        f"r(4)=16 exact: {exact}; s=10/3 rejected: {rejected}; "
        f"limit deviation {limit:.1e} at s=1e7 (tol 1e-6)",
        t0, 1.0,
    )


def test_criterion_09_temporal_order(capsys):
    """Richardson estimate of the integrator's temporal order on a nonlinear
    run at N=16: 4 +- 0.5."""
    t0 = time.perf_counter()
    p = Params(nu=0.01, eta=0.01, kappa=0.0, g=1.0, n=16, t_end=1.0)
    ic = State(
        u=random_divergence_free(16, m=p.m, seed=91),
        b=random_divergence_free(16, m=p.m, seed=92),
        theta=random_scalar_field(16, m=p.m, seed=93),
    )

    def advance(dt, n_steps):
        st = ic.copy()
        p_dt = Params(nu=p.nu, eta=p.eta, kappa=p.kappa, g=p.g, n=p.n, dt=dt,
                      t_end=n_steps * dt)
        for _ in range(n_steps):
            st, _ = step(st, p_dt)
        return st

    s1, s2, s3 = advance(0.02, 5), advance(0.01, 10), advance(0.005, 20)
    e1 = np.sqrt(spectral.l2_norm_sq(s1.u - s3.u) + spectral.l2_norm_sq(s1.b - s3.b))
    e2 = np.sqrt(spectral.l2_norm_sq(s2.u - s3.u) + spectral.l2_norm_sq(s2.b - s3.b))
    # against the dt/4 reference, e1/e2 = (1 - 4^-p)/(4^-p - 16^-p) = 17
    # for p = 4; remove that known inflation before comparing to p
    order = float(np.log2(e1 / e2) - np.log2(17.0 / 16.0))
    _report(
        capsys, 9, "temporal order of the integrator",
        3.5 <= order <= 4.5,
        f"Richardson order {order:.2f} (target 4 +- 0.5)",
        t0, 60.0,
    )


def test_criterion_10_io_and_self_check(capsys, tmp_path):
    """Snapshot round trip bit-exact, CSV round trip full precision, and the
    `check` subcommand exits 0."""
    t0 = time.perf_counter()
    p = Params(nu=0.1, eta=0.2, kappa=0.3, g=0.4, n=8, t_end=1.0)
    st = State(
        u=random_divergence_free(8, seed=101),
        b=random_divergence_free(8, seed=102),
        theta=random_scalar_field(8, seed=103),
        t=0.625,
    )
    path = tmp_path / "acc.mhdb"
    mio.write_snapshot(st, p, path)
    st2, _ = mio.read_snapshot(path)
    snap_ok = (
        np.array_equal(st.u, st2.u)
        and np.array_equal(st.b, st2.b)
        and np.array_equal(st.theta, st2.theta)
        and st.t == st2.t
    )

    recs = [diagnostics.record_from_state(st, p)]
    csv_path = tmp_path / "acc.csv"
    mio.write_timeseries(recs, csv_path)
    data = mio.read_timeseries(csv_path)
    csv_ok = all(
        data[name][0] == getattr(recs[0], name)
        for name in recs[0].field_names()
    )

    with capsys.disabled():
        check_code = cli_main(["check"])

    _report(
        capsys, 10, "persistence and self-check",
        snap_ok and csv_ok and check_code == 0,
        f"snapshot bit-exact: {snap_ok}; CSV full-precision: {csv_ok}; "
        f"check exit code {check_code}",
        t0, 10.0,
    )
