"""CSV and summary writers with deterministic number formatting."""
from __future__ import annotations

import numpy as np


def fmt(x) -> str:
    """17 significant digits, round-trip exact for float64."""
    return f"{float(x):.17g}"


def write_csv(path, header, columns) -> None:
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    n = len(cols[0])
    if any(len(c) != n for c in cols):
        raise ValueError("CSV columns must have equal length")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_summary(path, items) -> None:
    with open(path, "w", newline="\n") as fh:
        for key, value in items.items():
            fh.write(f"{key} = {fmt(value)}\n")


def read_summary(path) -> dict[str, float]:
    out = {}
    with open(path) as fh:
        for line in fh:
            if line.strip():
                key, value = line.split("=", 1)
                out[key.strip()] = float(value)
    return out
