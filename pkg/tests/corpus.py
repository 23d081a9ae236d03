"""Shared graph builders for the test suite.

The random corpus is seed-deterministic and spans the structural corner
cases the engines must survive: dangling-heavy graphs, unreferenced
vertices, disconnected halves, and graphs whose every edge targets a
dangling vertex.
"""

from __future__ import annotations

import numpy as np

from pushrank import Graph, from_edges


def chain3() -> Graph:
    return from_edges(3, [0, 1], [1, 2], name="chain3")


def cycle2() -> Graph:
    return from_edges(2, [0, 1], [1, 0], name="cycle2")


def star4() -> Graph:
    return from_edges(4, [0, 0, 0], [1, 2, 3], name="star4")


def fanin3() -> Graph:
    return from_edges(3, [0, 1], [2, 2], name="fanin3")


def single_vertex() -> Graph:
    return from_edges(1, [], [], name="single")


def selfloop2() -> Graph:
    return from_edges(2, [0, 0], [0, 1], name="selfloop2")


def handcrafted() -> list[Graph]:
    return [chain3(), cycle2(), star4(), fanin3(), single_vertex(), selfloop2()]


def random_graph(rng: np.random.Generator, tag: int = 0) -> Graph:
    """One random graph: n <= 50, density 0.05-0.5, dangling share 0-0.5."""
    n = int(rng.integers(2, 51))
    density = float(rng.uniform(0.05, 0.5))
    dangling_fraction = float(rng.uniform(0.0, 0.5))
    n_dangling = int(round(n * dangling_fraction))
    n_live = max(0, n - n_dangling)
    style = int(rng.integers(0, 8))

    adj = rng.random((n_live, n)) < density
    if style == 0 and n_dangling > 0:
        adj[:, :n_live] = False  # every edge targets a dangling vertex
    elif style == 1 and n >= 4:
        half = n // 2
        cut = min(half, n_live)
        adj[:cut, half:] = False  # two blocks with no cross edges
        adj[cut:, :half] = False
    src, dst = np.nonzero(adj)
    g = from_edges(n, src, dst, name=f"rand{tag}-n{n}")
    g.validate()
    return g


def random_corpus(count: int, seed: int = 20260811) -> list[Graph]:
    rng = np.random.default_rng(seed)
    return [random_graph(rng, tag=i) for i in range(count)]
