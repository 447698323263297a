"""Config schema, binary snapshot round trips, and CSV emission."""

import struct

import numpy as np
import pytest

from mhdbq import io as mio
from mhdbq.diagnostics import record_from_state
from mhdbq.dynamics import Params, State
from mhdbq.errors import ConfigurationError, DataCorruptionError, SnapshotFormatError
from mhdbq.experiments import (
    MonitorSample,
    SweepResult,
    random_divergence_free,
    random_scalar_field,
)

GOOD_CONFIG = """\
[physics]
nu = 0.01
eta = 0.02
kappa = 0.0
g = 1.5

[numerics]
n = 16
dt = 0.005
t_end = 0.05
seed = 9

[initial]
preset = random-sobolev
amplitude = 0.3

[output]
cadence = 5
"""


def _write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


# ---- config ---------------------------------------------------------------


def test_parse_config_round_trip(tmp_path):
    cfg = mio.parse_config(_write(tmp_path, GOOD_CONFIG))
    assert cfg.params.nu == 0.01 and cfg.params.eta == 0.02
    assert cfg.params.g == 1.5 and cfg.params.n == 16 and cfg.params.seed == 9
    assert cfg.params.m == 5  # defaulted to floor(n/3)
    assert cfg.preset == "random-sobolev" and cfg.amplitude == 0.3
    assert cfg.sigma == 4.0 and cfg.cadence == 5  # defaults fill in

    text = mio.serialize_config(cfg)
    cfg2 = mio.parse_config(_write(tmp_path, text, "round.ini"))
    assert cfg2 == cfg


def test_parse_config_rejects_unknown_key(tmp_path):
    bad = GOOD_CONFIG.replace("g = 1.5", "gravity = 1.5")
    with pytest.raises(ConfigurationError) as err:
        mio.parse_config(_write(tmp_path, bad))
    assert "gravity" in str(err.value)


def test_parse_config_rejects_unknown_section(tmp_path):
    with pytest.raises(ConfigurationError) as err:
        mio.parse_config(_write(tmp_path, GOOD_CONFIG + "\n[forcing]\nf = 1\n"))
    assert "forcing" in str(err.value)


def test_parse_config_missing_required_key(tmp_path):
    bad = GOOD_CONFIG.replace("t_end = 0.05\n", "")
    with pytest.raises(ConfigurationError) as err:
        mio.parse_config(_write(tmp_path, bad))
    assert "t_end" in str(err.value)


def test_parse_config_bad_value(tmp_path):
    bad = GOOD_CONFIG.replace("n = 16", "n = sixteen")
    with pytest.raises(ConfigurationError) as err:
        mio.parse_config(_write(tmp_path, bad))
    assert "'n'" in str(err.value)


def test_parse_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        mio.parse_config(tmp_path / "nope.ini")


# ---- snapshots ------------------------------------------------------------


def _random_state(n=8, t=0.375):
    return State(
        u=random_divergence_free(n, seed=501),
        b=random_divergence_free(n, seed=502),
        theta=random_scalar_field(n, seed=503),
        t=t,
    )


def test_snapshot_round_trip_is_bit_exact(tmp_path):
    st = _random_state()
    p = Params(nu=0.1, eta=0.2, kappa=0.3, g=0.4, n=8, t_end=1.0)
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(st, p, path)
    st2, p2 = mio.read_snapshot(path)
    assert st2.t == st.t
    assert np.array_equal(st2.u, st.u)
    assert np.array_equal(st2.b, st.b)
    assert np.array_equal(st2.theta, st.theta)
    assert (p2.nu, p2.eta, p2.kappa, p2.g, p2.n, p2.m) == (0.1, 0.2, 0.3, 0.4, 8, 2)


def test_snapshot_file_size(tmp_path):
    st = _random_state()
    p = Params(n=8, t_end=1.0)
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(st, p, path)
    # header: 4s + 3*u32 + 5*f64 + u32 = 60 bytes; payload: 7 * N^3 * 16
    assert path.stat().st_size == 60 + 7 * 8 ** 3 * 16


def test_snapshot_rejects_bad_magic(tmp_path):
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(_random_state(), Params(n=8, t_end=1.0), path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(SnapshotFormatError):
        mio.read_snapshot(path)


def test_snapshot_rejects_bad_version(tmp_path):
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(_random_state(), Params(n=8, t_end=1.0), path)
    raw = bytearray(path.read_bytes())
    struct.pack_into("<I", raw, 4, 99)
    path.write_bytes(bytes(raw))
    with pytest.raises(SnapshotFormatError):
        mio.read_snapshot(path)


def test_snapshot_rejects_truncation(tmp_path):
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(_random_state(), Params(n=8, t_end=1.0), path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(SnapshotFormatError):
        mio.read_snapshot(path)
    path.write_bytes(raw[:30])
    with pytest.raises(SnapshotFormatError):
        mio.read_snapshot(path)


def test_snapshot_rejects_non_hermitian_payload(tmp_path):
    path = tmp_path / "state.mhdb"
    mio.write_snapshot(_random_state(), Params(n=8, t_end=1.0), path)
    raw = bytearray(path.read_bytes())
    # corrupt one coefficient of u1 without touching its conjugate partner
    struct.pack_into("<d", raw, 60 + 16 * 100, 7.25)
    path.write_bytes(bytes(raw))
    with pytest.raises(DataCorruptionError):
        mio.read_snapshot(path)


# ---- CSV ------------------------------------------------------------------


def test_timeseries_round_trip_full_precision(tmp_path):
    p = Params(nu=1.0 / 3.0, n=8, t_end=1.0)
    recs, samples = [], []
    for i in range(3):
        st = _random_state(t=i * (1.0 / 3.0))
        recs.append(record_from_state(st, p))
        samples.append(
            MonitorSample(
                t=st.t,
                j_sq=np.pi * (i + 1),
                l_sq=np.e * (i + 1),
                ps=np.array([0.1, 0.2, 0.3, 4.0 / 7.0]) * (i + 1),
            )
        )
    path = tmp_path / "series.csv"
    mio.write_timeseries(recs, path, samples)
    data = mio.read_timeseries(path)
    assert set(data) == set(recs[0].field_names()) | set(mio.MONITOR_COLUMNS)
    for name in recs[0].field_names():
        assert np.array_equal(data[name], [getattr(r, name) for r in recs])
    assert np.array_equal(data["J2"], [np.pi * (i + 1) for i in range(3)])
    assert np.array_equal(data["ps_b3"], [4.0 / 7.0 * (i + 1) for i in range(3)])


def test_timeseries_without_monitors(tmp_path):
    p = Params(n=8, t_end=1.0)
    recs = [record_from_state(_random_state(t=0.0), p)]
    path = tmp_path / "series.csv"
    mio.write_timeseries(recs, path)
    data = mio.read_timeseries(path)
    assert np.array_equal(data["J2"], [0.0])


def test_sweep_csv(tmp_path):
    result = SweepResult(
        kind="kappa",
        labels=[0.1, 0.01],
        errors=[1.0 / 3.0, 0.05],
        blown_up=[False, True],
        fitted_order=1.0,
        order_stderr=None,
        wall_times=[0.5, 0.25],
    )
    path = tmp_path / "sweep.csv"
    mio.write_sweep_csv(result, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "label,error,blown_up,wall_time"
    assert lines[1].split(",")[1] == f"{1.0 / 3.0:.17g}"
    assert lines[2].split(",")[2] == "1"
