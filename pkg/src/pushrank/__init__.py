"""pushrank: parallel PageRank via improved forward push.

Engines push probability mass along out-edges with full reservation and
settle dangling vertices either implicitly (one-phase) or in a single
final pass (two-phase); exact dense/series/power solvers provide the
reference values the benchmark harness checks them against.
"""

from ._backend import available_backends, resolve_backend
from .engines import (
    MassState,
    Partition,
    ifp1_run,
    ifp2_full_run,
    ifp2_run,
    partition_vertices,
    sync_simulate,
)
from .graph import (
    Graph,
    GraphFormatError,
    IFP2Graph,
    StatsRow,
    VertexClassification,
    classify,
    from_edges,
    load_edge_list,
    preprocess_ifp2,
    stats,
)
from .solvers import (
    PageRankVector,
    SolverConfig,
    dense_oracle,
    forward_push_ppr,
    power_method,
    series_pagerank,
)
from .trace import RunTrace, TraceSample

__version__ = "0.1.0"

__all__ = [
    "Graph", "GraphFormatError", "IFP2Graph", "StatsRow", "VertexClassification",
    "classify", "from_edges", "load_edge_list", "preprocess_ifp2", "stats",
    "PageRankVector", "SolverConfig", "dense_oracle", "forward_push_ppr",
    "power_method", "series_pagerank",
    "MassState", "Partition", "partition_vertices",
    "ifp1_run", "ifp2_run", "ifp2_full_run", "sync_simulate",
    "RunTrace", "TraceSample",
    "available_backends", "resolve_backend",
    "__version__",
]
