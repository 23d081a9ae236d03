"""On-disk formats: ranking CSV, raw binary vectors, stats CSV."""

from __future__ import annotations

import csv
import struct

import numpy as np

from .graph import Graph, STATS_CSV_HEADER, StatsRow
from .solvers import PageRankVector


def write_ranking_csv(vec: PageRankVector, g: Graph, path) -> None:
    """Scores sorted descending (ties broken by original id, ascending)."""
    order = np.lexsort((g.original_ids, -vec.values))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex_original_id", "score"])
        for idx in order:
            writer.writerow([int(g.original_ids[idx]), repr(float(vec.values[idx]))])


def write_vector_binary(vec: PageRankVector, path) -> None:
    """Little-endian int64 length followed by the float64 values."""
    values = np.asarray(vec.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<q", values.size))
        fh.write(values.tobytes())


def read_vector_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        (n,) = struct.unpack("<q", fh.read(8))
        data = np.frombuffer(fh.read(8 * n), dtype="<f8")
    if data.size != n:
        raise ValueError(f"truncated vector file: expected {n} values, got {data.size}")
    return data.astype(np.float64)


def write_stats_csv(rows: list[StatsRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_csv_row())
