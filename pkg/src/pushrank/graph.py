"""Directed graphs in compressed adjacency form, plus structural analysis.

Everything downstream (solvers, push engines, benchmarks) consumes the
arrays built here and treats them as read-only, so a single Graph can be
shared across worker threads without copies or locks.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list stream cannot be parsed into a graph."""


@dataclass
class Graph:
    """Immutable directed graph with both out- and in-adjacency in CSR form.

    ``out_degree`` is the original out-degree and stays authoritative even
    when engines later work on a reduced edge set: push weights are always
    ``1/out_degree``.  ``original_ids`` maps the dense internal ids back to
    the ids that appeared in the input (dense ids are assigned in order of
    first appearance).
    """

    n: int
    m: int
    out_offsets: np.ndarray
    out_targets: np.ndarray
    out_degree: np.ndarray
    in_offsets: np.ndarray
    in_sources: np.ndarray
    in_degree: np.ndarray
    original_ids: np.ndarray
    raw_edge_count: int
    name: str = "graph"

    def out_neighbors(self, v: int) -> np.ndarray:
        return self.out_targets[self.out_offsets[v] : self.out_offsets[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self.in_sources[self.in_offsets[v] : self.in_offsets[v + 1]]

    def edge_set(self) -> set[tuple[int, int]]:
        """All (source, target) pairs; intended for tests and validation."""
        src = np.repeat(np.arange(self.n), np.diff(self.out_offsets))
        return set(zip(src.tolist(), self.out_targets.tolist()))

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError("graph must have at least one vertex")
        if self.out_offsets.shape[0] != self.n + 1 or self.out_offsets[-1] != self.m:
            raise ValueError("out_offsets inconsistent with n/m")
        if np.any(np.diff(self.out_offsets) < 0):
            raise ValueError("out_offsets must be non-decreasing")
        if not np.array_equal(np.diff(self.out_offsets), self.out_degree):
            raise ValueError("out_degree inconsistent with out_offsets")
        if self.m and (self.out_targets.min() < 0 or self.out_targets.max() >= self.n):
            raise ValueError("edge target out of range")


@dataclass
class VertexClassification:
    """Structural vertex classes of a directed graph.

    ``dangling`` vertices have no out-links, ``unreferenced`` no in-links.
    The weak variants are exposed by iteratively deleting all currently
    dangling/unreferenced vertices until a fixed point: a vertex that only
    becomes dangling (unreferenced) after deletions is weak dangling (weak
    unreferenced).  Weak sets never overlap their base set.
    ``dangling_edge_count`` counts edges whose target is a dangling vertex.
    """

    dangling: np.ndarray
    unreferenced: np.ndarray
    weak_dangling: np.ndarray
    weak_unreferenced: np.ndarray
    dangling_edge_count: int

    def dangling_mask(self, n: int) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.dangling] = True
        return mask


@dataclass
class IFP2Graph:
    """Graph preprocessed for two-phase pushing.

    Edges into dangling vertices are partitioned out of the adjacency
    rather than deleted: ``live_targets`` holds only non-dangling targets,
    while ``source_ids`` records, per dangling vertex, the sources of the
    removed edges (CSR over ``dangling_ids``).  Original out-degrees live
    on ``base`` and remain the push-weight denominators.
    """

    base: Graph
    live_offsets: np.ndarray
    live_targets: np.ndarray
    live_degree: np.ndarray
    dangling_ids: np.ndarray
    source_offsets: np.ndarray
    source_ids: np.ndarray
    dangling_edge_count: int


@dataclass
class StatsRow:
    """One dataset summary row: vertex/edge counts and dangling structure."""

    name: str
    n: int
    m: int
    dangling_vertices: int
    dangling_edges: int
    avg_degree: float
    raw_edge_count: int

    def as_csv_row(self) -> list:
        return [self.name, self.n, self.m, self.dangling_vertices,
                self.dangling_edges, f"{self.avg_degree:.6g}"]


STATS_CSV_HEADER = ["name", "n", "m", "n_d", "m_d", "deg"]


def from_edges(n: int, src, dst, name: str = "graph",
               original_ids=None, raw_edge_count: int | None = None) -> Graph:
    """Build a Graph from parallel source/target id arrays.

    Duplicate (source, target) pairs collapse to a single edge; self-loops
    are kept.  ``n`` may exceed the largest referenced id, which is how
    isolated vertices are represented.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    if src.shape != dst.shape:
        raise ValueError("source and target arrays must have equal length")
    if n < 1:
        raise ValueError("graph must have at least one vertex")
    raw = int(src.shape[0]) if raw_edge_count is None else int(raw_edge_count)
    if src.shape[0]:
        if src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n:
            raise ValueError("vertex id out of range")
        key = src * np.int64(n) + dst
        key = np.unique(key)  # sorts by (src, dst) and removes duplicates
        src = key // n
        dst = key % n
    m = int(src.shape[0])

    out_degree = np.bincount(src, minlength=n).astype(np.int64)
    out_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(out_degree, out=out_offsets[1:])

    in_degree = np.bincount(dst, minlength=n).astype(np.int64)
    in_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(in_degree, out=in_offsets[1:])
    order = np.argsort(dst, kind="stable")  # within a target: ascending source
    in_sources = src[order]

    if original_ids is None:
        original_ids = np.arange(n, dtype=np.int64)
    g = Graph(
        n=n, m=m,
        out_offsets=out_offsets, out_targets=dst, out_degree=out_degree,
        in_offsets=in_offsets, in_sources=in_sources, in_degree=in_degree,
        original_ids=np.asarray(original_ids, dtype=np.int64),
        raw_edge_count=raw, name=name,
    )
    g.validate()
    return g


def _slow_parse(text: str) -> tuple[np.ndarray, np.ndarray]:
    """Line-by-line parse used to produce precise error positions."""
    src, dst = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'src dst', got {stripped!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex id in {stripped!r}") from None
        if a < 0 or b < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex id in {stripped!r}")
        src.append(a)
        dst.append(b)
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)


def load_edge_list(source, name: str | None = None) -> Graph:
    """Load a whitespace-separated edge list ("src dst" per line).

    Accepts a path, bytes, or a binary/text stream.  Lines starting with
    '#' are comments.  Vertex ids may be arbitrary non-negative integers;
    they are remapped to a dense [0, n) range in order of first appearance
    (interleaved source/target order), with the original ids retained on
    the Graph.  Duplicate edges are dropped; a stream with no edges is an
    error.
    """
    if isinstance(source, (str, os.PathLike)):
        inferred = os.path.splitext(os.path.basename(os.fspath(source)))[0]
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        inferred = "graph"
        data = source.read() if hasattr(source, "read") else source
    if isinstance(data, str):
        data = data.encode()
    text = data.decode("utf-8", errors="replace")

    try:
        import pandas as pd

        frame = pd.read_csv(
            io.StringIO(text), sep=r"\s+", comment="#", header=None,
            dtype=np.int64, engine="c",
        )
        if frame.shape[1] != 2:
            raise GraphFormatError("expected two columns")
        raw_src = frame[0].to_numpy(dtype=np.int64)
        raw_dst = frame[1].to_numpy(dtype=np.int64)
        if raw_src.size and (raw_src.min() < 0 or raw_dst.min() < 0):
            raise GraphFormatError("negative vertex id")
    except GraphFormatError:
        raw_src, raw_dst = _slow_parse(text)  # re-parse for the line number
    except Exception:
        raw_src, raw_dst = _slow_parse(text)

    if raw_src.size == 0:
        raise GraphFormatError("empty graph: no edges found")

    # Dense remap preserving first-appearance order of ids.
    flat = np.empty(raw_src.size * 2, dtype=np.int64)
    flat[0::2] = raw_src
    flat[1::2] = raw_dst
    sorted_ids, first_pos = np.unique(flat, return_index=True)
    appearance = np.argsort(first_pos, kind="stable")
    rank = np.empty(sorted_ids.size, dtype=np.int64)
    rank[appearance] = np.arange(sorted_ids.size, dtype=np.int64)
    dense = rank[np.searchsorted(sorted_ids, flat)]

    return from_edges(
        n=int(sorted_ids.size),
        src=dense[0::2], dst=dense[1::2],
        name=name or inferred,
        original_ids=sorted_ids[appearance],
        raw_edge_count=int(raw_src.size),
    )


def _gather_rows(offsets: np.ndarray, values: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate CSR rows `rows` of `values` without a Python loop."""
    lengths = offsets[rows + 1] - offsets[rows]
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=values.dtype)
    starts = np.repeat(offsets[rows], lengths)
    ends = np.cumsum(lengths)
    index = np.arange(total, dtype=np.int64) - np.repeat(ends - lengths, lengths) + starts
    return values[index]


def classify(g: Graph) -> VertexClassification:
    """Identify dangling/unreferenced vertices and their weak variants.

    The weak sets come from round-based peeling: delete every currently
    dangling or unreferenced vertex, record vertices newly exposed as
    dangling/unreferenced, and repeat until a round exposes nothing.  A
    vertex can be both weak dangling and weak unreferenced.  Terminates in
    at most n rounds and is deterministic.
    """
    dangling_mask = g.out_degree == 0
    unreferenced_mask = g.in_degree == 0
    dangling_edge_count = int(g.in_degree[dangling_mask].sum())

    alive = np.ones(g.n, dtype=bool)
    cur_out = g.out_degree.copy()
    cur_in = g.in_degree.copy()
    weak_dangling = np.zeros(g.n, dtype=bool)
    weak_unreferenced = np.zeros(g.n, dtype=bool)

    to_delete = dangling_mask | unreferenced_mask
    while to_delete.any():
        victims = np.flatnonzero(to_delete)
        alive[victims] = False

        tgts = _gather_rows(g.out_offsets, g.out_targets, victims)
        tgts = tgts[alive[tgts]]
        np.subtract.at(cur_in, tgts, 1)

        srcs = _gather_rows(g.in_offsets, g.in_sources, victims)
        srcs = srcs[alive[srcs]]
        np.subtract.at(cur_out, srcs, 1)

        new_dangling = alive & (cur_out == 0)
        new_unreferenced = alive & (cur_in == 0)
        weak_dangling |= new_dangling & ~dangling_mask
        weak_unreferenced |= new_unreferenced & ~unreferenced_mask
        to_delete = new_dangling | new_unreferenced

    return VertexClassification(
        dangling=np.flatnonzero(dangling_mask),
        unreferenced=np.flatnonzero(unreferenced_mask),
        weak_dangling=np.flatnonzero(weak_dangling),
        weak_unreferenced=np.flatnonzero(weak_unreferenced),
        dangling_edge_count=dangling_edge_count,
    )


def stats(g: Graph, cls: VertexClassification) -> StatsRow:
    """Summary counts in the harness's dataset-table format."""
    return StatsRow(
        name=g.name,
        n=g.n,
        m=g.m,
        dangling_vertices=int(cls.dangling.size),
        dangling_edges=cls.dangling_edge_count,
        avg_degree=g.m / g.n,
        raw_edge_count=g.raw_edge_count,
    )


def dangling_target_counts(g: Graph, cls: VertexClassification) -> np.ndarray:
    """Per-vertex count of out-edges whose target is dangling."""
    if g.m == 0:
        return np.zeros(g.n, dtype=np.int64)
    mask = cls.dangling_mask(g.n)[g.out_targets].astype(np.int64)
    cum = np.concatenate(([0], np.cumsum(mask)))
    return cum[g.out_offsets[1:]] - cum[g.out_offsets[:-1]]


def preprocess_ifp2(g: Graph, cls: VertexClassification) -> IFP2Graph:
    """Partition the adjacency for two-phase pushing.

    One O(m) scan splits each vertex's targets into non-dangling ("live")
    and dangling; the dangling side is re-indexed by target so phase two
    can visit each dangling vertex's sources once.  The base graph is not
    modified.
    """
    dangling_mask = cls.dangling_mask(g.n)
    if g.m:
        keep = ~dangling_mask[g.out_targets]
        live_targets = g.out_targets[keep]
        kept = np.concatenate(([0], np.cumsum(keep.astype(np.int64))))
        live_degree = kept[g.out_offsets[1:]] - kept[g.out_offsets[:-1]]
    else:
        live_targets = np.empty(0, dtype=np.int64)
        live_degree = np.zeros(g.n, dtype=np.int64)
    live_offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(live_degree, out=live_offsets[1:])

    dangling_ids = cls.dangling
    counts = g.in_degree[dangling_ids]
    source_offsets = np.zeros(dangling_ids.size + 1, dtype=np.int64)
    np.cumsum(counts, out=source_offsets[1:])
    source_ids = _gather_rows(g.in_offsets, g.in_sources, dangling_ids)

    return IFP2Graph(
        base=g,
        live_offsets=live_offsets,
        live_targets=live_targets,
        live_degree=live_degree,
        dangling_ids=dangling_ids,
        source_offsets=source_offsets,
        source_ids=source_ids,
        dangling_edge_count=cls.dangling_edge_count,
    )
