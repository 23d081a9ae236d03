"""Exact and baseline PageRank solvers.

These are the reference routes the push engines are checked against, so
they deliberately share no kernel code with the engine module: the dense
solve and the series/power iterations are built directly on numpy.

Model: a random surfer follows an out-edge of the current vertex with
probability ``damping`` (uniform over out-edges) and restarts with the
complementary probability; at a vertex with no out-edges the surfer
restarts according to the personalization distribution.  The PageRank
vector is the stationary distribution of that chain.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .graph import Graph
from .trace import RunTrace, TraceSample

DENSE_VERTEX_LIMIT = 2000
REDISTRIBUTE_VERTEX_LIMIT = 100_000
REFERENCE_ITERATIONS = 210


@dataclass
class SolverConfig:
    """Shared solver knobs.

    ``personalization`` is the restart distribution (None means uniform),
    ``threshold`` is the push cutoff: vertices holding at most this much
    pending mass are not processed.
    """

    damping: float = 0.85
    personalization: np.ndarray | None = None
    threshold: float = 1e-10
    max_iterations: int = REFERENCE_ITERATIONS

    def validate(self, n: int) -> None:
        if not 0.0 < self.damping < 1.0:
            raise ValueError(f"damping must be in (0,1), got {self.damping}")
        if not self.threshold > 0.0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if self.personalization is not None:
            p = np.asarray(self.personalization, dtype=np.float64)
            if p.shape != (n,):
                raise ValueError("personalization length must equal vertex count")
            if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
                raise ValueError("personalization must be a probability distribution")

    def restart_vector(self, n: int) -> np.ndarray:
        if self.personalization is None:
            return np.full(n, 1.0 / n, dtype=np.float64)
        return np.asarray(self.personalization, dtype=np.float64).copy()

    def with_threshold(self, threshold: float) -> "SolverConfig":
        return replace(self, threshold=threshold)


@dataclass
class PageRankVector:
    """A score vector plus provenance.

    ``values`` is a probability vector for normalized results; otherwise
    ``mass_total`` records the pre-normalization total so callers can tell
    the two apart.
    """

    values: np.ndarray
    algorithm: str
    damping: float
    threshold: float | None = None
    iterations: int | None = None
    mass_total: float | None = None
    workers: int | None = None

    def normalized(self) -> "PageRankVector":
        total = float(self.values.sum())
        if total <= 0:
            raise ValueError("cannot normalize a vector with non-positive total")
        return replace(self, values=self.values / total, mass_total=total)


def _dangling_mask(g: Graph) -> np.ndarray:
    return g.out_degree == 0


def dense_oracle(g: Graph, cfg: SolverConfig) -> PageRankVector:
    """Direct dense linear solve of the stationary equations.

    Builds the column-stochastic walk matrix with dangling columns replaced
    by the restart distribution and solves
    ``(I - damping * W) x = (1 - damping) * p`` exactly, then normalizes.
    Guarded to small graphs: the matrix is materialized densely.
    """
    cfg.validate(g.n)
    if g.n > DENSE_VERTEX_LIMIT:
        raise ValueError(
            f"dense oracle refused: n={g.n} exceeds the {DENSE_VERTEX_LIMIT}-vertex guard"
        )
    p = cfg.restart_vector(g.n)
    w = np.zeros((g.n, g.n), dtype=np.float64)
    for v in range(g.n):
        targets = g.out_neighbors(v)
        if targets.size:
            np.add.at(w[:, v], targets, 1.0 / g.out_degree[v])
        else:
            w[:, v] = p
    system = np.eye(g.n) - cfg.damping * w
    x = np.linalg.solve(system, (1.0 - cfg.damping) * p)
    total = float(x.sum())
    return PageRankVector(
        values=x / total, algorithm="dense", damping=cfg.damping, mass_total=total
    )


class _WalkMultiplier:
    """Destination-partitioned sparse multiply ``y = damping * W @ x``.

    Each destination's contribution is the sum of ``damping * x[s] / deg(s)``
    over its in-edges, accumulated in fixed in-adjacency order, so the
    result is identical no matter how many workers the range is split
    across.  Dangling vertices contribute nothing here; callers add the
    restart correction themselves.
    """

    def __init__(self, g: Graph, damping: float, workers: int = 1):
        self.g = g
        self.damping = damping
        self.workers = max(1, int(workers))
        self.inv_degree = np.zeros(g.n, dtype=np.float64)
        nz = g.out_degree > 0
        self.inv_degree[nz] = 1.0 / g.out_degree[nz]
        # one trailing sentinel so an offset equal to m stays a valid index
        self._gathered = np.zeros(g.m + 1, dtype=np.float64)
        bounds = np.linspace(0, g.n, self.workers + 1).astype(np.int64)
        self._ranges = [
            (int(bounds[j]), int(bounds[j + 1]))
            for j in range(self.workers)
            if bounds[j] < bounds[j + 1]
        ]
        self._pool = None
        if len(self._ranges) > 1:
            self._pool = ThreadPoolExecutor(max_workers=len(self._ranges))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _segment(self, y: np.ndarray, lo: int, hi: int) -> None:
        g = self.g
        idx = g.in_offsets[lo : hi + 1]
        sums = np.add.reduceat(self._gathered, idx)[:-1]
        empty = g.in_degree[lo:hi] == 0
        if empty.any():
            sums[empty] = 0.0
        y[lo:hi] = sums

    def __call__(self, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        g = self.g
        y = out if out is not None else np.empty(g.n, dtype=np.float64)
        if g.m == 0:
            y[:] = 0.0
            return y
        z = self.damping * x * self.inv_degree
        self._gathered[: g.m] = z[g.in_sources]
        if self._pool is None:
            self._segment(y, 0, g.n)
        else:
            futures = [
                self._pool.submit(self._segment, y, lo, hi) for lo, hi in self._ranges
            ]
            for f in futures:
                f.result()
        return y


def power_method(
    g: Graph,
    cfg: SolverConfig,
    workers: int = 1,
    tolerance: float = 0.0,
    on_iterate=None,
) -> tuple[PageRankVector, RunTrace]:
    """Damped power iteration with the dangling mass folded in as a
    rank-one restart correction (no dangling columns are materialized).

    Runs ``cfg.max_iterations`` iterations, or stops early once the L1
    change drops below ``tolerance`` when that is positive.  Every iterate
    is a probability vector.  With ``workers > 1`` the multiply is
    partitioned by destination vertex and the result is run-to-run
    deterministic (in fact identical to the single-worker result).
    ``on_iterate(k, pi)`` is called with each iterate (read-only view);
    returning a truthy value stops the iteration.
    """
    cfg.validate(g.n)
    p = cfg.restart_vector(g.n)
    dangling = _dangling_mask(g)
    multiply = _WalkMultiplier(g, cfg.damping, workers)
    pi = p.copy()
    trace = RunTrace(meta={
        "algorithm": "power", "workers": workers, "damping": cfg.damping,
        "tolerance": tolerance,
    })
    start = time.perf_counter()
    y = np.empty(g.n, dtype=np.float64)
    iterations = 0
    try:
        for k in range(cfg.max_iterations):
            multiply(pi, out=y)
            restart = cfg.damping * float(pi[dangling].sum()) + (1.0 - cfg.damping)
            nxt = y + restart * p
            nxt /= nxt.sum()
            delta = float(np.abs(nxt - pi).sum())
            pi, y = nxt, pi
            iterations = k + 1
            trace.samples.append(TraceSample(
                t=k, h_l1=delta,
                converged=int(np.count_nonzero(np.abs(pi - y) <= cfg.threshold)),
                alpha=1.0, work=g.m + g.n, push_ops=(k + 1) * g.m,
                push_ops_dangling=0,
                wall_ms=(time.perf_counter() - start) * 1e3,
            ))
            if on_iterate is not None and on_iterate(k, pi):
                break
            if tolerance > 0.0 and delta < tolerance:
                break
    finally:
        multiply.close()
    trace.meta["iterations"] = iterations
    vec = PageRankVector(
        values=pi, algorithm="power", damping=cfg.damping,
        iterations=iterations, workers=workers, mass_total=float(pi.sum()),
    )
    return vec, trace


def series_pagerank(g: Graph, cfg: SolverConfig, terms: int) -> PageRankVector:
    """Truncated damped-walk series, normalized.

    Accumulates ``sum_{r=0..terms} (damping * W)^r p`` by repeated sparse
    multiplies (mass entering dangling vertices simply stops propagating)
    and returns the normalized total.  Partial sums grow monotonically
    componentwise, and the normalized limit is the PageRank vector.
    """
    cfg.validate(g.n)
    if terms < 0:
        raise ValueError("terms must be >= 0")
    p = cfg.restart_vector(g.n)
    multiply = _WalkMultiplier(g, cfg.damping, workers=1)
    x = p.copy()
    y = p.copy()
    for _ in range(terms):
        y = multiply(y)
        x += y
    total = float(x.sum())
    return PageRankVector(
        values=x / total, algorithm="series", damping=cfg.damping,
        iterations=terms, mass_total=total,
    )


def forward_push_ppr(
    g: Graph,
    cfg: SolverConfig,
    dangling_mode: str = "redistribute",
    on_pass=None,
) -> PageRankVector:
    """Serial push with fractional reservation: the personalized-walk
    baseline.

    Every vertex holding pending mass above the threshold reserves the
    ``1 - damping`` fraction and pushes ``damping/deg`` of it along each
    out-edge; the scan is ascending by vertex id and restarts until a full
    pass processes nothing.  At dangling vertices the pushed fraction
    either vanishes (``terminate``) or is spread over all vertices in
    proportion to the restart distribution (``redistribute``, the behavior
    that makes the normalized result equal PageRank while conserving total
    mass).  Returns the raw reserved-mass vector; ``mass_total`` records
    its sum.

    ``on_pass``, when given, is called after every pass with
    ``(reserved_total, pending_total)``.
    """
    cfg.validate(g.n)
    if dangling_mode not in ("terminate", "redistribute"):
        raise ValueError(f"unknown dangling_mode {dangling_mode!r}")
    if dangling_mode == "redistribute" and g.n > REDISTRIBUTE_VERTEX_LIMIT:
        raise ValueError(
            "redistribute mode refused: each dangling push fans out to all "
            f"n={g.n} vertices (guard at {REDISTRIBUTE_VERTEX_LIMIT})"
        )
    p = cfg.restart_vector(g.n)
    xi = cfg.threshold
    c = cfg.damping
    h = p.copy()
    reserved = np.zeros(g.n, dtype=np.float64)
    passes = 0
    while True:
        processed = 0
        for v in range(g.n):
            mass = h[v]
            if mass <= xi:
                continue
            processed += 1
            reserved[v] += (1.0 - c) * mass
            h[v] = 0.0
            targets = g.out_neighbors(v)
            if targets.size:
                np.add.at(h, targets, c * mass / g.out_degree[v])
            elif dangling_mode == "redistribute":
                h += (c * mass) * p
        passes += 1
        if on_pass is not None:
            on_pass(float(reserved.sum()), float(h.sum()))
        if processed == 0:
            break
        if passes > 1_000_000:
            raise RuntimeError("forward push failed to settle (threshold too small?)")
    return PageRankVector(
        values=reserved, algorithm=f"forward-push-{dangling_mode}",
        damping=c, threshold=xi, iterations=passes,
        mass_total=float(reserved.sum()),
    )
