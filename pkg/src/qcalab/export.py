"""CSV / JSON writers with shortest round-trip float formatting."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCAN_HEADER = ("n", "o", "p", "kx", "ky", "kz", "branch", "phase")
DISPERSION_HEADER = SCAN_HEADER + ("energy",)
POLARIZATION_HEADER = ("kx", "ky", "kz", "e1x", "e1y", "e1z", "e2x", "e2y", "e2z")


def format_value(v) -> str:
    """``repr`` of Python floats is the shortest string that round-trips."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def plain(v):
    """Convert numpy scalars/arrays to JSON-native values."""
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, list(r)


def write_table(path, header: Sequence[str], rows: Iterable[Sequence], fmt: str = "csv") -> None:
    """Write rows as CSV or as a JSON list of records."""
    if fmt == "csv":
        write_csv(path, header, rows)
    elif fmt == "json":
        records = [dict(zip(header, plain(list(r)))) for r in rows]
        write_json(path, records)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def dumps(obj) -> str:
    return json.dumps(plain(obj), indent=2, sort_keys=True)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def polarization_rows(pairs) -> list[tuple]:
    return [(*p.k, *p.e1, *p.e2) for p in pairs]
