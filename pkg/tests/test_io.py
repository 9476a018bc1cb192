import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tphase.io import (
    RunManifest,
    atomic_write,
    config_hash,
    csv_bytes,
    field_csv_bytes,
    format_value,
    read_csv,
    read_snapshot,
    snapshot_bytes,
    write_csv,
    write_snapshot,
)


def test_snapshot_round_trip(tmp_path):
    data = np.random.default_rng(0).normal(size=(16, 8))
    path = write_snapshot(tmp_path / "sub" / "phi.bin", data, "phi", 0.125, 1.0, 0.5)
    snap = read_snapshot(path)
    assert (snap.name, snap.time, snap.Lx, snap.Ly, snap.shape) == ("phi", 0.125, 1.0, 0.5, (16, 8))
    np.testing.assert_array_equal(snap.data, data)


def test_snapshot_rejects_bad_input(tmp_path):
    with pytest.raises(ValueError):
        snapshot_bytes(np.array([1.0, np.nan]).reshape(1, 2), "x", 0, 1, 1)
    with pytest.raises(ValueError):
        snapshot_bytes(np.zeros(4), "x", 0, 1, 1)
    with pytest.raises(ValueError):
        snapshot_bytes(np.zeros((2, 2)), "two words", 0, 1, 1)
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"hello")
    with pytest.raises(ValueError):
        read_snapshot(bad)
    truncated = tmp_path / "short.bin"
    truncated.write_bytes(snapshot_bytes(np.zeros((4, 4)), "x", 0, 1, 1)[:-8])
    with pytest.raises(ValueError, match="expected 16 values"):
        read_snapshot(truncated)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    atomic_write(tmp_path / "a.txt", b"one")
    atomic_write(tmp_path / "a.txt", b"two")
    assert (tmp_path / "a.txt").read_bytes() == b"two"
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_cells_round_trip(x):
    assert float(format_value(x)) == x


def test_format_value_types():
    assert format_value(True) == "1"
    assert format_value(np.int64(7)) == "7"
    assert format_value("mode") == "mode"


def test_csv_write_and_read(tmp_path):
    path = write_csv(tmp_path / "t.csv", ("a", "b"), [(1, 0.1), {"a": 2, "b": 1 / 3}])
    rows = read_csv(path)
    assert rows == [{"a": "1", "b": "0.10000000000000001"}, {"a": "2", "b": "0.33333333333333331"}]
    assert csv_bytes(("a",), [(1,)]) == b"a\n1\n"


def test_field_csv_is_exact():
    data = np.random.default_rng(1).normal(size=(3, 4))
    back = np.loadtxt(field_csv_bytes(data).decode().splitlines(), delimiter=",")
    np.testing.assert_array_equal(back, data)


def test_config_hash_ignores_key_order():
    a = {"numerics": {"dt": 1e-5, "Nx": 64}, "model": {"model": "degenerate"}}
    b = {"model": {"model": "degenerate"}, "numerics": {"Nx": 64, "dt": 1e-5}}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({**a, "extra": {}})


def test_manifest_round_trip(tmp_path):
    m = RunManifest("abc", {"x": 1}, str(tmp_path), "0.1.0", "2026-01-01T00:00:00+00:00")
    m.extra["exit_code"] = 0
    m.write(tmp_path / "manifest.json")
    assert RunManifest.read(tmp_path / "manifest.json") == m
    assert json.loads((tmp_path / "manifest.json").read_text())["status"] == "running"
