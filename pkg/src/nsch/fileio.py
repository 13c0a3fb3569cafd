"""Bit-exact output formats: binary snapshots, CSV time series, PGM heatmaps.

Snapshot layout (little-endian): magic "NSCH1" (5 bytes), format version
u16, grid size N u32, time t f64, then 3*N^2 f64 physical-space values for
theta, u1, u2 in C row-major order with values[i, j] = f(2pi i/N, 2pi j/N).
Reads reject bad magic, unsupported versions and truncated payloads without
building partial state.

CSV columns follow the DiagnosticsRecord field order; floats print with 17
significant digits, so re-parsing reproduces every double exactly.

Heatmaps are binary PGM (P5), 8 bit, theta mapped linearly from [-1, 1] to
[0, 255] with round-half-up (theta = 0 -> 128); row 0 is the line x2 = 0.
"""

from __future__ import annotations

import struct
from dataclasses import astuple

import numpy as np

from .diagnostics import RECORD_FIELDS, DiagnosticsRecord
from .errors import SnapshotFormatError
from .spectral import Grid, ScalarField, VectorField, transform

SNAPSHOT_MAGIC = b"NSCH1"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<5sHId")


def write_snapshot(path, t: float, theta: ScalarField, u: VectorField):
    n = theta.grid.n
    payload = np.concatenate([
        theta.values().ravel(),
        u.u1.values().ravel(),
        u.u2.values().ravel(),
    ]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, n, float(t)))
        fh.write(payload.tobytes())


def read_snapshot(path):
    """Returns (t, theta, u); the grid is rebuilt with the default dealias cut."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, version, n, t = _HEADER.unpack_from(blob)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(
            f"{path}: unsupported snapshot version {version} (reader supports {SNAPSHOT_VERSION})"
        )
    expected = _HEADER.size + 3 * n * n * 8
    if len(blob) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(blob) - _HEADER.size} bytes, expected {expected - _HEADER.size}"
        )
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    grid = Grid(n)
    theta_v, u1_v, u2_v = (data[i * n * n:(i + 1) * n * n].reshape(n, n) for i in range(3))
    return float(t), transform(theta_v, grid), VectorField(transform(u1_v, grid),
                                                           transform(u2_v, grid))


# ---------------------------------------------------------------------------
# CSV time series

def format_float(x: float) -> str:
    return f"{x:.17g}"


def emit_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for rec in records:
            cells = []
            for value in astuple(rec):
                cells.append(str(value) if isinstance(value, int) else format_float(value))
            fh.write(",".join(cells) + "\n")


def parse_csv(path):
    """Re-read an emitted CSV into DiagnosticsRecord objects (exact values)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != ",".join(RECORD_FIELDS):
            raise ValueError(f"{path}: unexpected CSV header {header!r}")
        records = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            kwargs = {}
            for name, cell in zip(RECORD_FIELDS, cells):
                kwargs[name] = int(cell) if name == "clamp_events" else float(cell)
            records.append(DiagnosticsRecord(**kwargs))
    return records


# ---------------------------------------------------------------------------
# PGM heatmaps

def emit_heatmap(theta: ScalarField, path):
    """8-bit P5 heatmap; pixel = round-half-up((theta + 1)/2 * 255)."""
    vals = theta.values()
    pixels = np.floor((np.clip(vals, -1.0, 1.0) + 1.0) * 0.5 * 255.0 + 0.5)
    pixels = np.clip(pixels, 0, 255).astype(np.uint8)
    n = theta.grid.n
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
        # image row r holds the line x2 = 2 pi r / N
        fh.write(pixels.T.tobytes())
