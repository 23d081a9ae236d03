"""Concurrent push engines and their synchronous analysis twin.

Two production engines live here.  The one-phase engine runs K free
workers that circularly drain above-threshold pending mass from their
assigned non-dangling vertices (full reservation, pushes along all
out-edges); dangling vertices never push, their accumulated pending mass
joins the result at normalization time.  The two-phase engine restricts
phase one to edges with non-dangling targets and, once phase one is
quiescent, settles every dangling vertex in a single pass from its
sources' reserved mass, so each edge into a dangling vertex is pushed
exactly once.

Concurrency contract
--------------------
Graph structure is immutable and shared.  The pending-mass array is
shared-mutable: increments are lost-update-free and a vertex is drained by
exchanging its cell with zero, so mass arriving mid-push is kept for the
next pass.  Reserved mass is written only by the owning worker.  The
monitor (the calling thread) declares convergence only after a probe
observes every scanned vertex at or below the threshold with no push
in flight and none started during the probe; this closes the race where a
worker drains one vertex while creating fresh above-threshold mass behind
the scan cursor.  A run returns only after all workers have stopped.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass

import numpy as np

from ._backend import resolve_backend
from .graph import Graph, IFP2Graph, VertexClassification, _gather_rows, classify, \
    dangling_target_counts, preprocess_ifp2
from .solvers import PageRankVector, SolverConfig
from .trace import RunTrace, TraceSample

PARTITION_STRATEGIES = ("contiguous", "strided", "degree-balanced")


@dataclass
class MassState:
    """Working state of a push run: reserved and pending mass per vertex."""

    reserved: np.ndarray
    pushing: np.ndarray

    @classmethod
    def fresh(cls, n: int) -> "MassState":
        return cls(reserved=np.zeros(n, dtype=np.float64),
                   pushing=np.ones(n, dtype=np.float64))


@dataclass
class Partition:
    """Vertex-to-worker assignment.

    ``worker_vertices`` covers the non-dangling universe (or everything
    when built without a classification); ``worker_dangling`` carries the
    dangling side for two-phase runs.  Sets are disjoint, sorted ascending
    (the scan order), and deterministic for fixed inputs.
    """

    strategy: str
    worker_vertices: list[np.ndarray]
    worker_dangling: list[np.ndarray] | None = None

    @property
    def workers(self) -> int:
        return len(self.worker_vertices)


def _split(ids: np.ndarray, weights: np.ndarray, workers: int, strategy: str) -> list[np.ndarray]:
    if strategy == "contiguous":
        parts = np.array_split(ids, workers)
    elif strategy == "strided":
        parts = [ids[j::workers] for j in range(workers)]
    elif strategy == "degree-balanced":
        # heaviest-first modulo assignment: per-worker load stays within
        # one max item of the mean, i.e. within 2x of mean whenever no
        # single vertex outweighs the mean load
        order = np.lexsort((ids, -weights))
        parts = [ids[order[j::workers]] for j in range(workers)]
    else:
        raise ValueError(f"unknown partition strategy {strategy!r}")
    return [np.sort(part).astype(np.int64) for part in parts]


def partition_vertices(
    g: Graph,
    workers: int,
    strategy: str = "degree-balanced",
    cls: VertexClassification | None = None,
) -> Partition:
    """Assign vertices to workers.

    With a classification, the non-dangling vertices form the scan
    universe (weights: out-degree + 1) and the dangling vertices are split
    separately for the settle pass (weights: in-degree + 1).  Without one,
    all vertices are split.
    """
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    if cls is None:
        universe = np.arange(g.n, dtype=np.int64)
        return Partition(strategy, _split(universe, g.out_degree[universe] + 1, workers, strategy))
    mask = cls.dangling_mask(g.n)
    universe = np.flatnonzero(~mask)
    dangling = np.flatnonzero(mask)
    return Partition(
        strategy,
        _split(universe, g.out_degree[universe] + 1, workers, strategy),
        _split(dangling, g.in_degree[dangling] + 1, workers, strategy),
    )


class _PushPhase:
    """K workers plus counters for one concurrent push phase."""

    def __init__(self, backend, h, reserved, offsets, targets, degree,
                 worker_sets, dt_count, xi, damping):
        self.backend = backend
        self.h = h
        self.xi = xi
        self.ctrl = np.zeros(1, dtype=np.int64)
        self.wstate = np.zeros(8 * max(1, len(worker_sets)), dtype=np.int64)
        self.lock = threading.Lock() if backend.NEEDS_LOCK else None
        self.threads = [
            threading.Thread(
                target=backend.worker_loop,
                args=(h, reserved, offsets, targets, degree, vertices,
                      xi, damping, self.ctrl, self.wstate, j, dt_count, self.lock),
                daemon=True,
            )
            for j, vertices in enumerate(worker_sets)
        ]

    def start(self) -> None:
        for t in self.threads:
            t.start()

    def probe(self, scan_ids: np.ndarray) -> bool:
        return bool(self.backend.probe(
            self.h, scan_ids, self.xi, self.wstate, len(self.threads), self.lock
        ))

    def stop_and_join(self) -> None:
        self.ctrl[0] = 1
        for t in self.threads:
            t.join()

    @property
    def push_ops(self) -> int:
        return int(self.wstate[2::8].sum())

    @property
    def push_ops_dangling(self) -> int:
        return int(self.wstate[3::8].sum())


def _sample(t, h, scan_ids, dangling_mask, degree, xi, push_ops, push_ops_dangling, wall_ms):
    """Build a trace row from the (possibly in-flight) shared state."""
    above = h > xi
    above_mass = float(h[above].sum())
    nd_above = float(h[above & ~dangling_mask].sum())
    h_l1 = float(h.sum())
    scan_above = h[scan_ids] > xi if scan_ids.size else np.zeros(0, dtype=bool)
    return TraceSample(
        t=t,
        h_l1=h_l1,
        converged=int(scan_above.size - np.count_nonzero(scan_above)),
        alpha=(nd_above / above_mass) if above_mass > 0.0 else 1.0,
        work=int((degree[scan_ids[scan_above]] + 1).sum()),
        push_ops=push_ops,
        push_ops_dangling=push_ops_dangling,
        wall_ms=wall_ms,
        active_mass=above_mass,
        carry_mass=h_l1 - above_mass,
    )


def _run_phase(backend, h, reserved, offsets, targets, degree, worker_sets,
               scan_ids, dt_count, xi, damping, dangling_mask, trace,
               start_time, sample_every):
    phase = _PushPhase(backend, h, reserved, offsets, targets, degree,
                       worker_sets, dt_count, xi, damping)
    phase.start()
    last_sample = -math.inf
    # on big graphs a probe pass is costly, so back off between probes;
    # on small ones just yield
    pause = 0.0005 if scan_ids.size > 100_000 else 0.0
    try:
        while True:
            quiescent = phase.probe(scan_ids)
            now = time.perf_counter()
            if not quiescent and now - last_sample >= sample_every:
                trace.samples.append(_sample(
                    len(trace.samples), h, scan_ids, dangling_mask, degree, xi,
                    phase.push_ops, phase.push_ops_dangling,
                    (now - start_time) * 1e3,
                ))
                last_sample = now
            if quiescent:
                break
            time.sleep(pause)
    finally:
        phase.stop_and_join()
    trace.samples.append(_sample(
        len(trace.samples), h, scan_ids, dangling_mask, degree, xi,
        phase.push_ops, phase.push_ops_dangling,
        (time.perf_counter() - start_time) * 1e3,
    ))
    return phase


def _auto_sample_every(n: int, sample_every: float | None) -> float:
    if sample_every is not None:
        return sample_every
    return 0.01 if n <= 100_000 else 0.25


def ifp1_run(
    g: Graph,
    cls: VertexClassification,
    cfg: SolverConfig,
    workers: int = 1,
    strategy: str = "degree-balanced",
    backend: str | None = None,
    sample_every: float | None = None,
) -> tuple[PageRankVector, RunTrace]:
    """One-phase concurrent push over the non-dangling vertices.

    Every vertex starts with one unit of pending mass.  Workers reserve
    the full drained amount and push the ``damping/degree`` share along
    every out-edge, dangling targets included.  The result is the
    normalized sum of reserved plus leftover pending mass, so dangling
    accumulation and sub-threshold residue both count.
    """
    cfg.validate(g.n)
    kern = resolve_backend(backend)
    part = partition_vertices(g, workers, strategy, cls)
    mask = cls.dangling_mask(g.n)
    scan_ids = np.flatnonzero(~mask)
    dt_count = dangling_target_counts(g, cls)
    state = MassState.fresh(g.n)
    trace = RunTrace(meta={
        "algorithm": "ifp1", "threshold": cfg.threshold, "workers": workers,
        "strategy": strategy, "backend": kern.NAME,
    })
    start = time.perf_counter()
    _run_phase(kern, state.pushing, state.reserved, g.out_offsets, g.out_targets,
               g.out_degree, part.worker_vertices, scan_ids, dt_count,
               cfg.threshold, cfg.damping, mask, trace, start,
               _auto_sample_every(g.n, sample_every))
    trace.meta["wall_s"] = time.perf_counter() - start
    values = state.reserved + state.pushing
    total = float(values.sum())
    vec = PageRankVector(
        values=values / total, algorithm="ifp1", damping=cfg.damping,
        threshold=cfg.threshold, iterations=len(trace.samples),
        mass_total=total, workers=workers,
    )
    return vec, trace


def _settle_dangling(pg: IFP2Graph, damping: float,
                     reserved: np.ndarray, pushing: np.ndarray) -> int:
    """Give every dangling vertex its final mass in one pass.

    A dangling vertex's total inflow equals the sum over its sources of
    ``damping * reserved[source] / degree(source)`` plus whatever pending
    mass it already holds, because a source's reserved mass is exactly the
    total it ever drained.  Sums run in fixed source order, so the result
    does not depend on the worker count.  Returns the edge-push count
    (one per source edge).
    """
    ids = pg.dangling_ids
    if ids.size == 0:
        return 0
    vals = damping * reserved[pg.source_ids] / pg.base.out_degree[pg.source_ids]
    ext = np.append(vals, 0.0)
    sums = np.add.reduceat(ext, pg.source_offsets)[:-1]
    sums[np.diff(pg.source_offsets) == 0] = 0.0
    reserved[ids] = pushing[ids] + sums
    pushing[ids] = 0.0
    return int(pg.source_ids.size)


def ifp2_run(
    pg: IFP2Graph,
    cfg: SolverConfig,
    workers: int = 1,
    strategy: str = "degree-balanced",
    backend: str | None = None,
    sample_every: float | None = None,
) -> tuple[PageRankVector, RunTrace]:
    """Two-phase concurrent push on a preprocessed graph.

    Phase one is the one-phase engine restricted to live (non-dangling)
    targets, with push weights still taken from original out-degrees.
    Once the monitor certifies phase one quiescent, the dangling settle
    pass runs exactly once, so pushes into dangling vertices total exactly
    the number of edges pointing at them.  The result is the normalized
    reserved mass; non-dangling sub-threshold residue (at most the
    threshold per vertex) is dropped.
    """
    g = pg.base
    cfg.validate(g.n)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    kern = resolve_backend(backend)
    mask = np.zeros(g.n, dtype=bool)
    mask[pg.dangling_ids] = True
    universe = np.flatnonzero(~mask)
    worker_sets = _split(universe, g.out_degree[universe] + 1, workers, strategy)
    state = MassState.fresh(g.n)
    dt_zero = np.zeros(g.n, dtype=np.int64)
    trace = RunTrace(meta={
        "algorithm": "ifp2", "threshold": cfg.threshold, "workers": workers,
        "strategy": strategy, "backend": kern.NAME,
    })
    start = time.perf_counter()
    phase = _run_phase(kern, state.pushing, state.reserved, pg.live_offsets,
                       pg.live_targets, g.out_degree, worker_sets, universe,
                       dt_zero, cfg.threshold, cfg.damping, mask, trace, start,
                       _auto_sample_every(g.n, sample_every))
    settled = _settle_dangling(pg, cfg.damping, state.reserved, state.pushing)
    trace.samples.append(_sample(
        len(trace.samples), state.pushing, universe, mask, g.out_degree,
        cfg.threshold, phase.push_ops + settled, phase.push_ops_dangling + settled,
        (time.perf_counter() - start) * 1e3,
    ))
    trace.meta["wall_s"] = time.perf_counter() - start
    total = float(state.reserved.sum())
    vec = PageRankVector(
        values=state.reserved / total, algorithm="ifp2", damping=cfg.damping,
        threshold=cfg.threshold, iterations=len(trace.samples),
        mass_total=total, workers=workers,
    )
    return vec, trace


SYNC_VARIANTS = ("ifp1", "ifp2", "fp-full")


def sync_simulate(
    subject: Graph | IFP2Graph,
    cfg: SolverConfig,
    variant: str = "ifp1",
    cls: VertexClassification | None = None,
    max_iterations: int = 1_000_000,
    on_iteration=None,
) -> tuple[PageRankVector, RunTrace]:
    """Deterministic iteration-synchronous twin of the push engines.

    Iteration t processes every scannable vertex whose pending mass
    exceeds the threshold against a snapshot of the state, producing the
    next state, so runs are bit-identical and the trace is exact.  One
    trace row is recorded per state (including the terminal one):
    cumulative push counts as of that state, the active/frozen split of
    the pending mass, the non-dangling share ``alpha`` of the active mass,
    and the work measure (out-degree + 1 summed over processed vertices).

    Variants: ``ifp1`` scans non-dangling vertices with full reservation;
    ``ifp2`` additionally pushes only along live edges and ends with the
    dangling settle pass; ``fp-full`` scans every vertex and reserves the
    ``1 - damping`` fraction, which is the analysis model whose active
    mass contracts by exactly ``damping * alpha(t)`` per iteration.

    ``on_iteration(t, reserved, pushing)`` is called after each update
    with read-only views.
    """
    if variant not in SYNC_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if isinstance(subject, IFP2Graph):
        pg = subject
        g = subject.base
    else:
        g = subject
        pg = None
    cfg.validate(g.n)
    if variant == "ifp2" and pg is None:
        pg = preprocess_ifp2(g, cls if cls is not None else classify(g))

    dangling_mask = g.out_degree == 0
    if variant == "fp-full":
        scan_mask = np.ones(g.n, dtype=bool)
        reserve_frac = 1.0 - cfg.damping
    else:
        scan_mask = ~dangling_mask
        reserve_frac = 1.0
    if variant == "ifp2":
        offsets, targets = pg.live_offsets, pg.live_targets
        dt_count = np.zeros(g.n, dtype=np.int64)
    else:
        offsets, targets = g.out_offsets, g.out_targets
        if g.m:
            is_dangling_target = dangling_mask[g.out_targets].astype(np.int64)
            cum = np.concatenate(([0], np.cumsum(is_dangling_target)))
            dt_count = cum[g.out_offsets[1:]] - cum[g.out_offsets[:-1]]
        else:
            dt_count = np.zeros(g.n, dtype=np.int64)

    xi = cfg.threshold
    c = cfg.damping
    state = MassState.fresh(g.n)
    h, reserved = state.pushing, state.reserved
    degree = g.out_degree
    trace = RunTrace(meta={
        "algorithm": f"sync-{variant}", "threshold": xi, "workers": 1,
        "backend": "sync",
    })
    start = time.perf_counter()
    push_ops = 0
    push_ops_dangling = 0
    iterations = 0
    for t in range(max_iterations + 1):
        above = h > xi
        active = above & scan_mask
        active_ids = np.flatnonzero(active)
        above_mass = float(h[above].sum())
        nd_above = float(h[above & ~dangling_mask].sum())
        h_l1 = float(h.sum())
        trace.samples.append(TraceSample(
            t=t, h_l1=h_l1,
            converged=int(np.count_nonzero(~above)),
            alpha=(nd_above / above_mass) if above_mass > 0.0 else 1.0,
            work=int((degree[active_ids] + 1).sum()),
            push_ops=push_ops, push_ops_dangling=push_ops_dangling,
            wall_ms=(time.perf_counter() - start) * 1e3,
            active_mass=above_mass, carry_mass=h_l1 - above_mass,
        ))
        if active_ids.size == 0:
            break
        amounts = h[active_ids]
        reserved[active_ids] += reserve_frac * amounts
        lengths = offsets[active_ids + 1] - offsets[active_ids]
        pushed_targets = _gather_rows(offsets, targets, active_ids)
        shares = np.zeros(active_ids.size, dtype=np.float64)
        haslinks = lengths > 0
        shares[haslinks] = c * amounts[haslinks] / degree[active_ids][haslinks]
        weights = np.repeat(shares, lengths)
        inflow = np.bincount(pushed_targets, weights=weights, minlength=g.n) \
            if pushed_targets.size else np.zeros(g.n, dtype=np.float64)
        h_next = np.where(active, 0.0, h) + inflow
        h[:] = h_next
        push_ops += int(lengths.sum())
        push_ops_dangling += int(dt_count[active_ids].sum())
        iterations = t + 1
        if on_iteration is not None:
            on_iteration(t, reserved, h)
    else:
        raise RuntimeError(f"sync simulation did not settle in {max_iterations} iterations")

    if variant == "ifp2":
        settled = _settle_dangling(pg, c, reserved, h)
        push_ops += settled
        push_ops_dangling += settled
        above = h > xi
        above_mass = float(h[above].sum())
        h_l1 = float(h.sum())
        trace.samples.append(TraceSample(
            t=len(trace.samples), h_l1=h_l1,
            converged=int(np.count_nonzero(~above)),
            alpha=1.0 if above_mass == 0.0 else float(h[above & ~dangling_mask].sum()) / above_mass,
            work=0, push_ops=push_ops, push_ops_dangling=push_ops_dangling,
            wall_ms=(time.perf_counter() - start) * 1e3,
            active_mass=above_mass, carry_mass=h_l1 - above_mass,
        ))

    trace.meta["wall_s"] = time.perf_counter() - start
    trace.meta["iterations"] = iterations
    if variant == "ifp1":
        values = reserved + h
    else:
        values = reserved
    total = float(values.sum())
    vec = PageRankVector(
        values=values / total, algorithm=f"sync-{variant}", damping=c,
        threshold=xi, iterations=iterations, mass_total=total, workers=1,
    )
    return vec, trace


def ifp2_full_run(
    g: Graph,
    cfg: SolverConfig,
    workers: int = 1,
    strategy: str = "degree-balanced",
    backend: str | None = None,
) -> tuple[PageRankVector, RunTrace, float]:
    """Classify + preprocess + run the two-phase engine.

    Returns the vector, the trace, and the preprocessing wall time
    (classification plus edge partitioning), which benchmark tables report
    separately from the push time.
    """
    t0 = time.perf_counter()
    cls = classify(g)
    pg = preprocess_ifp2(g, cls)
    preprocess_s = time.perf_counter() - t0
    vec, trace = ifp2_run(pg, cfg, workers=workers, strategy=strategy, backend=backend)
    trace.meta["preprocess_s"] = preprocess_s
    return vec, trace, preprocess_s
