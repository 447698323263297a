"""Config parsing, bit-exact snapshot persistence, CSV emission.

Snapshot layout (little-endian): magic "MHDB", u32 version=1, u32 N, u32 M,
f64 t, nu, eta, kappa, g, u32 field count (7).  Then for each of u1, u2, u3,
b1, b2, b3, theta: N^3 complex coefficients as (real, imag) f64 pairs, in
row-major ascending-wavevector order (k_i from -N/2 to N/2-1).
"""

from __future__ import annotations

import configparser
import io as _io
import struct

import numpy as np

from .diagnostics import DiagnosticsRecord
from .dynamics import Params, State
from .errors import ConfigurationError, DataCorruptionError, SnapshotFormatError
from .experiments import MonitorSample, RunConfig
from .spectral import grid_for, hermitian_violation

SNAPSHOT_MAGIC = b"MHDB"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIII5dI")
FIELD_COUNT = 7

MONITOR_COLUMNS = ["J2", "L2", "ps_u2", "ps_u3", "ps_b2", "ps_b3"]

# section -> key -> (converter, required, default)
_SCHEMA = {
    "physics": {
        "nu": (float, False, 0.0),
        "eta": (float, False, 0.0),
        "kappa": (float, False, 0.0),
        "g": (float, False, 1.0),
    },
    "numerics": {
        "n": (int, True, None),
        "m": (int, False, None),
        "dt": (float, False, 1e-3),
        "t_end": (float, True, None),
        "seed": (int, False, 0),
    },
    "initial": {
        "preset": (str, True, None),
        "amplitude": (float, True, None),
        "sigma": (float, False, 4.0),
    },
    "output": {
        "directory": (str, False, "out"),
        "cadence": (int, False, 10),
        "snapshot_cadence": (int, False, 0),
        "monitor_s": (float, False, 4.0),
    },
}


def parse_config(path) -> RunConfig:
    """Read a flat INI-style run configuration; unknown keys are rejected."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from exc

    values: dict[str, dict] = {}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        values[section] = {}
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigurationError(f"unknown key '{key}' in section [{section}]")
            conv = _SCHEMA[section][key][0]
            raw = cp[section][key]
            try:
                values[section][key] = conv(raw)
            except ValueError as exc:
                raise ConfigurationError(
                    f"bad value for '{key}' in [{section}]: {raw!r}"
                ) from exc

    resolved: dict[str, dict] = {}
    for section, keys in _SCHEMA.items():
        resolved[section] = {}
        for key, (_, required, default) in keys.items():
            if key in values.get(section, {}):
                resolved[section][key] = values[section][key]
            elif required:
                raise ConfigurationError(f"missing required key '{key}' in [{section}]")
            else:
                resolved[section][key] = default

    params = Params(
        nu=resolved["physics"]["nu"],
        eta=resolved["physics"]["eta"],
        kappa=resolved["physics"]["kappa"],
        g=resolved["physics"]["g"],
        n=resolved["numerics"]["n"],
        m=resolved["numerics"]["m"],
        dt=resolved["numerics"]["dt"],
        t_end=resolved["numerics"]["t_end"],
        seed=resolved["numerics"]["seed"],
    )
    return RunConfig(
        params=params,
        preset=resolved["initial"]["preset"],
        amplitude=resolved["initial"]["amplitude"],
        sigma=resolved["initial"]["sigma"],
        cadence=resolved["output"]["cadence"],
        snapshot_cadence=resolved["output"]["snapshot_cadence"],
        output_dir=resolved["output"]["directory"],
        monitor_s=resolved["output"]["monitor_s"],
    )


def serialize_config(config: RunConfig) -> str:
    """Inverse of parse_config (up to formatting)."""
    p = config.params
    cp = configparser.ConfigParser(interpolation=None)
    cp["physics"] = {
        "nu": repr(p.nu), "eta": repr(p.eta), "kappa": repr(p.kappa), "g": repr(p.g)
    }
    cp["numerics"] = {
        "n": str(p.n), "m": str(p.m), "dt": repr(p.dt),
        "t_end": repr(p.t_end), "seed": str(p.seed),
    }
    cp["initial"] = {
        "preset": config.preset,
        "amplitude": repr(config.amplitude),
        "sigma": repr(config.sigma),
    }
    cp["output"] = {
        "directory": config.output_dir,
        "cadence": str(config.cadence),
        "snapshot_cadence": str(config.snapshot_cadence),
        "monitor_s": repr(config.monitor_s),
    }
    buf = _io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ---- snapshots ------------------------------------------------------------


def _to_file_order(f: np.ndarray) -> np.ndarray:
    """FFT-order coefficients -> ascending-wavevector file order."""
    return np.fft.fftshift(f, axes=(-3, -2, -1))


def _from_file_order(f: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(f, axes=(-3, -2, -1))


def write_snapshot(state: State, params: Params, path) -> None:
    n = state.n
    header = _HEADER.pack(
        SNAPSHOT_MAGIC, SNAPSHOT_VERSION, n, params.m,
        state.t, params.nu, params.eta, params.kappa, params.g,
        FIELD_COUNT,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for comp in (*state.u, *state.b, state.theta):
            fh.write(
                np.ascontiguousarray(
                    _to_file_order(comp), dtype="<c16"
                ).tobytes()
            )


def read_snapshot(path) -> tuple[State, Params]:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n, m, t, nu, eta, kappa, g, count = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    if count != FIELD_COUNT:
        raise SnapshotFormatError(f"{path}: unexpected field count {count}")
    payload = raw[_HEADER.size :]
    expected = FIELD_COUNT * n ** 3 * 16
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    fields = np.frombuffer(payload, dtype="<c16").reshape(FIELD_COUNT, n, n, n)
    fields = _from_file_order(fields.astype(np.complex128))
    for i in range(FIELD_COUNT):
        viol = hermitian_violation(fields[i])
        if viol > 1e-10:
            raise DataCorruptionError(
                f"{path}: field {i} violates Hermitian symmetry ({viol:.3e})"
            )
    grid_for(n)  # validates N
    state = State(u=fields[0:3].copy(), b=fields[3:6].copy(), theta=fields[6].copy(), t=t)
    params = Params(nu=nu, eta=eta, kappa=kappa, g=g, n=n, m=m, t_end=max(t, 1.0))
    return state, params


# ---- CSV timeseries -------------------------------------------------------


def write_timeseries(
    records: list[DiagnosticsRecord],
    path,
    monitor_samples: list[MonitorSample] | None = None,
) -> None:
    """One row per cadence sample, 17 significant digits, locale-independent."""
    columns = DiagnosticsRecord.field_names() + MONITOR_COLUMNS
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for i, rec in enumerate(records):
            row = [getattr(rec, name) for name in DiagnosticsRecord.field_names()]
            if monitor_samples is not None:
                ms = monitor_samples[i]
                row += [ms.j_sq, ms.l_sq, *ms.ps]
            else:
                row += [0.0] * len(MONITOR_COLUMNS)
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_timeseries(path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(header)))
    return {name: data[:, j] for j, name in enumerate(header)}


def write_sweep_csv(result, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("label,error,blown_up,wall_time\n")
        for label, err, bl, wt in zip(
            result.labels, result.errors, result.blown_up, result.wall_times
        ):
            fh.write(f"{label:.17g},{err:.17g},{int(bl)},{wt:.17g}\n")
