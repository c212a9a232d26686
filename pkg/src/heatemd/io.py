"""CSV and JSON file formats.

Signal CSV: header ``t,value``, one row per sample, uniformly spaced ``t``.
Decomposition CSV: header ``t,imf1,...,imfK,residual`` with a JSON sidecar.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import SignalFormatError
from .signal_core import Signal

SPACING_RTOL = 1e-9


def fmt(x: float) -> str:
    """17 significant digits: exact round trip for float64."""
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file in the same directory plus rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def signal_from_rows(t: np.ndarray, values: np.ndarray) -> Signal:
    if t.shape[0] < 2:
        raise SignalFormatError("a signal CSV needs at least 2 rows")
    steps = np.diff(t)
    dt = (t[-1] - t[0]) / (t.shape[0] - 1)
    if not dt > 0 or np.any(steps <= 0):
        raise SignalFormatError("column t must be strictly increasing")
    if np.max(np.abs(steps - dt)) > SPACING_RTOL * dt:
        raise SignalFormatError("column t is not uniformly spaced")
    if not np.all(np.isfinite(values)):
        raise SignalFormatError("non-finite sample value")
    return Signal(values, 1.0 / dt, float(t[0]))


def read_signal_csv(path) -> Signal:
    """Parse a ``t,value`` CSV file into a :class:`Signal`."""
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise SignalFormatError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise SignalFormatError("expected header line 't,value'")
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(a), float(b)] for a, b in body], dtype=np.float64)
    except ValueError as exc:
        raise SignalFormatError(f"malformed row in {path}: {exc}") from exc
    if data.size == 0:
        raise SignalFormatError("no samples")
    return signal_from_rows(data[:, 0], data[:, 1])


def signal_csv_text(signal: Signal) -> str:
    lines = ["t,value"]
    lines += [f"{fmt(t)},{fmt(v)}" for t, v in zip(signal.times, signal.samples)]
    return "\n".join(lines) + "\n"


def write_signal_csv(path, signal: Signal) -> None:
    atomic_write_text(path, signal_csv_text(signal))


def columns_csv_text(header: list[str], columns: list[np.ndarray]) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def decomposition_csv_text(decomposition) -> str:
    imfs = decomposition.imfs
    header = ["t"] + [f"imf{k + 1}" for k in range(len(imfs))] + ["residual"]
    cols = [decomposition.residual.times] + [s.samples for s in imfs]
    cols.append(decomposition.residual.samples)
    return columns_csv_text(header, cols)


def read_columns_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV with a header row; returns (header, array of rows)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = [c.strip() for c in rows[0]]
    return header, np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
