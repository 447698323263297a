"""Command-line entry points.

Exit codes: 0 success, 1 blow-up-terminated run or failed self-test,
2 configuration error (including unknown subcommands and flags).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import diagnostics, dynamics, experiments, io, kernels, spectral
from .errors import ConfigurationError
from .spectral import grid_for


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdbq",
        description="Pseudo-spectral 3D MHD-Boussinesq solver and diagnostics harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="integrate one configured trajectory")
    run.add_argument("--config", required=True)
    run.add_argument("--output-dir", default=None)
    run.add_argument("--threads", type=int, default=1)

    sk = sub.add_parser("sweep-kappa", help="vanishing thermal-diffusivity sweep")
    sk.add_argument("--config", required=True)
    sk.add_argument("--kappas", required=True, help="comma-separated kappa values")
    sk.add_argument("--output-dir", default=None)
    sk.add_argument("--threads", type=int, default=1)

    cv = sub.add_parser("convergence", help="Galerkin-cutoff convergence study")
    cv.add_argument("--config", required=True)
    cv.add_argument("--cutoffs", required=True, help="comma-separated cutoffs")
    cv.add_argument("--output-dir", default=None)
    cv.add_argument("--threads", type=int, default=1)

    dp = sub.add_parser("depend", help="continuous dependence on initial data")
    dp.add_argument("--config", required=True)
    dp.add_argument("--deltas", required=True, help="comma-separated perturbation sizes")
    dp.add_argument("--output-dir", default=None)
    dp.add_argument("--threads", type=int, default=1)

    sub.add_parser("check", help="operator identity self-tests at N=16")
    return parser


def _parse_list(raw: str, conv):
    try:
        return [conv(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"bad list value {raw!r}: {exc}") from exc


def _prepare(args):
    config = io.parse_config(args.config)
    if getattr(args, "output_dir", None):
        config.output_dir = args.output_dir
    spectral.set_fft_workers(getattr(args, "threads", 1))
    os.makedirs(config.output_dir, exist_ok=True)
    return config


def _write_summary(config, payload, name="summary.json"):
    payload = dict(payload)
    payload["threads"] = spectral.get_fft_workers()
    payload["compiled_kernels"] = kernels.USING_SPEEDUPS
    path = os.path.join(config.output_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    return path


def _cmd_run(args) -> int:
    config = _prepare(args)
    snap_idx = [0]

    def snapshot_writer(state):
        path = os.path.join(config.output_dir, f"snapshot_{snap_idx[0]:05d}.mhdb")
        io.write_snapshot(state, config.params, path)
        snap_idx[0] += 1

    traj = experiments.run_simulation(
        config,
        snapshot_writer=snapshot_writer if config.snapshot_cadence else None,
    )
    io.write_timeseries(
        traj.records, os.path.join(config.output_dir, "timeseries.csv"),
        monitor_samples=traj.monitor_samples,
    )
    _write_summary(config, {
        "command": "run",
        "blown_up": traj.blown_up,
        "blowup_time": traj.blowup_time,
        "final_time": traj.final_state.t,
        "wall_time": traj.wall_time,
        "records": len(traj.records),
    })
    if traj.blown_up:
        print(f"run terminated by blow-up at t={traj.blowup_time:.6g}", file=sys.stderr)
        return 1
    print(f"run complete: t={traj.final_state.t:.6g}, {len(traj.records)} samples")
    return 0


def _sweep_command(args, kind) -> int:
    config = _prepare(args)
    if kind == "kappa":
        values = _parse_list(args.kappas, float)
        result = experiments.kappa_sweep(config, values)
    elif kind == "galerkin":
        values = _parse_list(args.cutoffs, int)
        result = experiments.galerkin_convergence(config, values)
    else:
        values = _parse_list(args.deltas, float)
        result = experiments.continuous_dependence(config, values)

    io.write_sweep_csv(result, os.path.join(config.output_dir, f"sweep_{result.kind}.csv"))
    extra = {
        k: v for k, v in result.extra.items() if isinstance(v, (int, float, bool, str))
    }
    _write_summary(config, {
        "command": kind,
        "labels": result.labels,
        "errors": [None if np.isnan(e) else e for e in result.errors],
        "blown_up": result.blown_up,
        "fitted_order": result.fitted_order,
        "order_stderr": result.order_stderr,
        **extra,
    }, name=f"summary_{result.kind}.json")
    for label, err, bl in zip(result.labels, result.errors, result.blown_up):
        status = "BLOWUP" if bl else f"error={err:.6e}"
        print(f"  case {label:g}: {status}")
    if result.fitted_order is not None:
        print(f"  fitted order: {result.fitted_order:.3f}")
    return 1 if any(result.blown_up) else 0


def _cmd_check(_args) -> int:
    n = 16
    grid = grid_for(n)
    ok = True

    def report(name, value, tol):
        nonlocal ok
        passed = value <= tol
        ok = ok and passed
        print(f"  {name}: {value:.3e} (tol {tol:.0e}) {'PASS' if passed else 'FAIL'}")

    v = experiments.random_divergence_free(n, seed=1)
    w = spectral.leray_project(v, grid)
    report(
        "leray idempotence",
        float(np.abs(spectral.leray_project(w, grid) - w).max() / np.abs(w).max()),
        1e-12,
    )
    report("leray divergence", spectral.divergence_residual(w, grid), 1e-12)

    worst_pair = 0.0
    worst_skew = 0.0
    for seed in range(5):
        u = experiments.random_divergence_free(n, seed=10 + seed)
        vv = experiments.random_divergence_free(n, seed=20 + seed)
        ww = experiments.random_divergence_free(n, seed=30 + seed)
        adv = dynamics.advect(u, vv, grid)
        scale = (
            np.sqrt(spectral.l2_norm_sq(u))
            * np.sqrt(diagnostics.grad_norm_sq(vv))
            * np.sqrt(spectral.l2_norm_sq(vv))
        )
        worst_pair = max(worst_pair, abs(spectral.l2_inner(adv, vv)) / scale)
        lhs = spectral.l2_inner(adv, ww)
        rhs = -spectral.l2_inner(dynamics.advect(u, ww, grid), vv)
        worst_skew = max(worst_skew, abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale))
    report("advection energy pairing", worst_pair, 1e-12)
    report("advection skew-symmetry", worst_skew, 1e-12)

    u = experiments.random_divergence_free(n, seed=3)
    b = experiments.random_divergence_free(n, seed=4)
    report("triple-product identity (horizontal)", diagnostics.lemma_identity_residual_h(u, grid), 1e-11)
    for axis in range(3):
        report(
            f"triple-product identity (coupled, axis {axis + 1})",
            diagnostics.lemma_identity_residual_pair(u, b, axis, grid),
            1e-11,
        )

    print("check:", "OK" if ok else "FAILED")
    return 0 if ok else 1


def main(argv=None) -> int:
    kernels.tune_malloc()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep-kappa":
            return _sweep_command(args, "kappa")
        if args.command == "convergence":
            return _sweep_command(args, "galerkin")
        if args.command == "depend":
            return _sweep_command(args, "depend")
        if args.command == "check":
            return _cmd_check(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
