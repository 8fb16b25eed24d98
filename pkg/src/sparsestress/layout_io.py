"""CSV readers/writers for layouts, solver traces and run summaries."""

from __future__ import annotations

import csv

import numpy as np

from .errors import ConfigError, GraphParseError
from .graph import Graph

AXES = ("x", "y", "z")
TRACE_HEADER = ("sweep", "stress", "relative_change", "elapsed_ms")


def axis_names(dim: int) -> list[str]:
    return [AXES[a] if a < len(AXES) else f"x{a}" for a in range(dim)]


def write_layout(path, g: Graph, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + axis_names(x.shape[1]))
        for i, label in enumerate(g.labels):
            w.writerow([label] + [repr(float(v)) for v in x[i]])


def read_layout(path, g: Graph) -> np.ndarray:
    """Read a layout CSV and reorder its rows to the graph's node order."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "id":
        raise GraphParseError(f"{path}: layout CSV must start with an 'id,...' header", 1)
    dim = len(rows[0]) - 1
    index = {str(label): i for i, label in enumerate(g.labels)}
    x = np.full((g.node_count, dim), np.nan)
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != dim + 1:
            raise GraphParseError(f"{path}: expected {dim + 1} columns", lineno)
        if row[0] not in index:
            raise ConfigError(f"{path}: node {row[0]!r} is not in the graph")
        try:
            x[index[row[0]]] = [float(v) for v in row[1:]]
        except ValueError:
            raise GraphParseError(f"{path}: bad coordinate in {row!r}", lineno) from None
        seen.add(row[0])
    if len(seen) != g.node_count:
        raise ConfigError(f"{path}: layout covers {len(seen)} of {g.node_count} nodes")
    return x


def write_trace(path, result) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in result.trace:
            w.writerow([r.sweep, repr(float(r.stress)), repr(float(r.relative_change)),
                        f"{r.elapsed_ms:.3f}"])


def write_rows(path_or_fh, header, rows) -> None:
    if hasattr(path_or_fh, "write"):
        w = csv.writer(path_or_fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(path_or_fh, "w", newline="") as fh:
        write_rows(fh, header, rows)
