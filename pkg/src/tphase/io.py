"""File formats: field snapshots, CSV tables and run manifests.

Every writer goes through :func:`atomic_write`, so a failed run never leaves a
half-written file behind.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = "TPHASE-SNAPSHOT 1"


def atomic_write(path, data: bytes) -> Path:
    """Write ``data`` to a temporary sibling file, then rename it over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# --------------------------------------------------------------------------
# snapshots


@dataclass
class Snapshot:
    name: str
    time: float
    Lx: float
    Ly: float
    data: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def snapshot_bytes(data: np.ndarray, name: str, time: float, Lx: float, Ly: float) -> bytes:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("snapshots hold 2D fields")
    if not np.all(np.isfinite(data)):
        raise ValueError("refusing to write a non-finite field")
    if any(c.isspace() for c in name) or not name:
        raise ValueError("field name must be a non-empty word")
    Nx, Ny = data.shape
    header = (
        f"{SNAPSHOT_MAGIC}\n"
        f"field {name}\n"
        f"grid {Nx} {Ny}\n"
        f"domain {Lx!r} {Ly!r}\n"
        f"time {float(time)!r}\n"
        "END\n"
    )
    return header.encode("ascii") + np.ascontiguousarray(data, dtype="<f8").tobytes()


def write_snapshot(path, data: np.ndarray, name: str, time: float, Lx: float, Ly: float) -> Path:
    return atomic_write(path, snapshot_bytes(data, name, time, Lx, Ly))


def read_snapshot(path) -> Snapshot:
    raw = Path(path).read_bytes()
    end = raw.find(b"END\n")
    if end < 0 or not raw.startswith(SNAPSHOT_MAGIC.encode()):
        raise ValueError(f"{path}: not a snapshot file")
    meta = {}
    for line in raw[:end].decode("ascii").splitlines()[1:]:
        key, *vals = line.split()
        meta[key] = vals
    Nx, Ny = (int(v) for v in meta["grid"])
    body = raw[end + 4 :]
    if len(body) != 8 * Nx * Ny:
        raise ValueError(f"{path}: expected {Nx * Ny} values, found {len(body) / 8:g}")
    data = np.frombuffer(body, dtype="<f8").reshape(Nx, Ny).astype(float)
    Lx, Ly = (float(v) for v in meta["domain"])
    return Snapshot(meta["field"][0], float(meta["time"][0]), Lx, Ly, data)


def field_csv_bytes(data: np.ndarray) -> bytes:
    """Plain CSV export of a (small) field, one grid row per line."""
    buf = io.StringIO()
    np.savetxt(buf, np.asarray(data, dtype=float), delimiter=",", fmt="%.17g")
    return buf.getvalue().encode()


# --------------------------------------------------------------------------
# CSV tables


def format_value(v) -> str:
    """Round-trip text for CSV cells: 17 significant digits for floats."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def csv_bytes(columns, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if isinstance(row, dict):
            row = [row[c] for c in columns]
        w.writerow([format_value(v) for v in row])
    return buf.getvalue().encode()


def write_csv(path, columns, rows) -> Path:
    return atomic_write(path, csv_bytes(list(columns), rows))


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# manifest


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form (sorted keys), independent of key order."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    parameters: dict
    output_dir: str
    version: str
    started: str
    finished: str | None = None
    wall_seconds: float | None = None
    status: str = "running"
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=2, default=str) + "\n"

    def write(self, path) -> Path:
        return atomic_write(path, self.to_json().encode())

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))
