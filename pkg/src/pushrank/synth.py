"""Seed-deterministic synthetic graph generation.

Desk-scale stand-ins for the big web crawls: a designated tail of the id
range gets no out-edges (the dangling set), every other vertex keeps at
least one out-edge via a cycle backbone, and the remaining edge budget is
sampled uniformly.  Identical (n, m, dangling_fraction, seed, connect)
always produce the identical graph and file.
"""

from __future__ import annotations

import numpy as np

from .graph import Graph, from_edges


def generate(
    n: int,
    m: int,
    dangling_fraction: float = 0.0,
    seed: int = 0,
    connect: bool = False,
    name: str | None = None,
    skew: float = 0.0,
    chain_fraction: float = 0.0,
) -> Graph:
    """Build a random directed graph with an exact dangling-vertex set.

    Vertices [n - n_d, n) are dangling (n_d = floor(n * dangling_fraction)).
    Every non-dangling vertex sits on a cycle through the non-dangling
    range, which pins its out-degree above zero and (with ``connect``)
    makes the non-dangling part strongly connected.  Requires
    m >= n - n_d and at least one non-dangling vertex.

    ``skew > 0`` draws targets from a heavy-tailed distribution instead of
    a uniform one (hub ids scattered by a seeded permutation), giving the
    vertex scores a long tail like real link graphs; with uniform targets
    the stationary vector is nearly uniform and iterative baselines start
    out almost converged.

    ``chain_fraction > 0`` reserves that share of the non-dangling range as
    pure cycle vertices (out-degree one, no random extras).  The resulting
    long paths are the slow mixing modes real link graphs have; a purely
    uniform random graph is an expander on which every iterative method
    looks instantly converged.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= dangling_fraction < 1.0:
        raise ValueError("dangling_fraction must be in [0, 1)")
    n_dangling = int(n * dangling_fraction)
    n_live = n - n_dangling
    if n_live < 1:
        raise ValueError("at least one non-dangling vertex required")
    if m < n_live:
        raise ValueError(
            f"m={m} too small: the {n_live} non-dangling vertices need one out-edge each"
        )
    if connect and m < n - 1:
        raise ValueError(f"connected graph needs m >= n-1, got m={m}")

    if skew < 0.0:
        raise ValueError("skew must be >= 0")
    if not 0.0 <= chain_fraction < 1.0:
        raise ValueError("chain_fraction must be in [0, 1)")
    n_sources = n_live - int(n_live * chain_fraction)
    if n_sources < 1:
        raise ValueError("chain_fraction leaves no vertices for random edges")
    rng = np.random.default_rng(seed)
    target_perm = rng.permutation(n).astype(np.int64) if skew > 0.0 else None

    def draw_targets(count: int) -> np.ndarray:
        if target_perm is None:
            return rng.integers(0, n, size=count, dtype=np.int64)
        raw = (n * rng.random(count) ** (1.0 + skew)).astype(np.int64)
        return target_perm[np.minimum(raw, n - 1)]

    live = np.arange(n_live, dtype=np.int64)
    backbone_src = live
    backbone_dst = (live + 1) % n_live
    if connect and n_dangling:
        # one edge into each dangling vertex keeps the whole graph weakly connected
        extra_src = rng.integers(0, n_live, size=n_dangling, dtype=np.int64)
        extra_dst = np.arange(n_live, n, dtype=np.int64)
        backbone_src = np.concatenate([backbone_src, extra_src])
        backbone_dst = np.concatenate([backbone_dst, extra_dst])

    keys = set_keys = np.unique(backbone_src * np.int64(n) + backbone_dst)
    want = m
    max_edges = n_sources * (n - 1) + n_live  # cycle edges plus random capacity
    if m > max_edges:
        raise ValueError(f"m={m} exceeds the ~{max_edges} edges this shape can hold")
    while keys.size < want:
        need = want - keys.size
        batch = max(1024, int(need * 1.3))
        src = rng.integers(0, n_sources, size=batch, dtype=np.int64)
        dst = draw_targets(batch)
        keys = np.unique(np.concatenate([keys, src * np.int64(n) + dst]))
    if keys.size > want:
        # drop a uniform random subset of the non-backbone edges; a biased
        # trim (e.g. by key order) would skew the degree structure
        surplus = np.setdiff1d(keys, set_keys, assume_unique=False)
        drop = rng.choice(surplus.size, size=keys.size - want, replace=False)
        keep_mask = np.ones(surplus.size, dtype=bool)
        keep_mask[drop] = False
        keys = np.union1d(set_keys, surplus[keep_mask])

    src = keys // n
    dst = keys % n
    label = name or f"synth-n{n}-m{m}-d{dangling_fraction:g}-s{seed}"
    return from_edges(n=n, src=src, dst=dst, name=label)


def write_edge_list(g: Graph, path) -> None:
    """Write the graph as 'src dst' lines using original vertex ids."""
    import pandas as pd

    src = np.repeat(np.arange(g.n), np.diff(g.out_offsets))
    with open(path, "w") as fh:
        fh.write(f"# {g.name}: n={g.n} m={g.m}\n")
        pd.DataFrame({
            "s": g.original_ids[src], "t": g.original_ids[g.out_targets],
        }).to_csv(fh, sep=" ", header=False, index=False, lineterminator="\n")
