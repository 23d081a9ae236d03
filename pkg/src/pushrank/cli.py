"""Command-line entry point.

Commands: ``info`` (dataset stats), ``run`` (one algorithm, ranking +
trace CSVs), ``sweep`` (threshold or parallelism sweeps), ``compare``
(time-to-target-error table), ``synth`` (seeded synthetic edge list).
Exit codes: 0 success, 2 usage/configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench, serialize, synth
from .engines import SYNC_VARIANTS, ifp1_run, ifp2_run, sync_simulate
from .graph import classify, load_edge_list, preprocess_ifp2, stats
from .solvers import SolverConfig, forward_push_ppr, power_method
from .trace import RunTrace

ALGORITHMS = ("spi", "mpi", "fp", "ifp1", "ifp2", "sync-sim")
STRATEGIES = ("contiguous", "strided", "degree-balanced")


class UsageError(Exception):
    pass


def _default_threads() -> int:
    env = os.environ.get("PUSHRANK_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"PUSHRANK_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pushrank",
        description="Parallel PageRank via improved forward push.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="edge-list file (src dst per line, # comments)")
    common.add_argument("--xi", type=float, default=1e-10, help="push threshold (default 1e-10)")
    common.add_argument("--c", type=float, default=0.85, dest="damping",
                        help="damping factor (default 0.85)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker count (default: PUSHRANK_THREADS or CPU count)")
    common.add_argument("--out", default="pushrank-out", help="output directory")
    common.add_argument("--seed", type=int, default=0, help="seed for synthetic graphs")
    common.add_argument("--strategy", choices=STRATEGIES, default="degree-balanced",
                        help="vertex-to-worker assignment")

    p_info = sub.add_parser("info", parents=[common], help="dataset statistics")

    p_run = sub.add_parser("run", parents=[common], help="run one algorithm")
    p_run.add_argument("--algo", choices=ALGORITHMS, required=True)
    p_run.add_argument("--iters", type=int, default=210,
                       help="power-iteration count for spi/mpi (default 210)")
    p_run.add_argument("--fp-mode", choices=("terminate", "redistribute"),
                       default="redistribute", help="dangling handling for --algo fp")
    p_run.add_argument("--variant", choices=SYNC_VARIANTS, default="ifp1",
                       help="variant for --algo sync-sim")

    p_sweep = sub.add_parser("sweep", parents=[common], help="threshold/parallelism sweep")
    p_sweep.add_argument("--algos", default="ifp1,ifp2",
                         help="comma-separated algorithms (default ifp1,ifp2)")
    p_sweep.add_argument("--xis", default="1e-4,1e-6,1e-8,1e-10",
                         help="comma-separated thresholds")
    p_sweep.add_argument("--threads-list", default=None,
                         help="comma-separated worker counts (switches to a parallelism sweep)")
    p_sweep.add_argument("--reps", type=int, default=3, help="timing repetitions (median)")

    p_cmp = sub.add_parser("compare", parents=[common], help="time to target error")
    p_cmp.add_argument("--target-err", type=float, default=1e-3)
    p_cmp.add_argument("--reps", type=int, default=3)

    p_synth = sub.add_parser("synth", parents=[common], help="generate a synthetic edge list")
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--m", type=int, required=True)
    p_synth.add_argument("--dangling-fraction", type=float, default=0.0)
    p_synth.add_argument("--connect", action="store_true",
                         help="guarantee weak connectivity (needs m >= n-1)")
    return parser


def _load(args):
    if not args.data:
        raise UsageError("--data is required for this command")
    if not os.path.exists(args.data):
        raise UsageError(f"dataset not found: {args.data}")
    return load_edge_list(args.data)


def _config(args) -> SolverConfig:
    if not 0.0 < args.damping < 1.0:
        raise UsageError(f"--c must be in (0,1), got {args.damping}")
    if args.xi <= 0.0:
        raise UsageError(f"--xi must be positive, got {args.xi}")
    return SolverConfig(damping=args.damping, threshold=args.xi)


def _threads(args) -> int:
    workers = args.threads if args.threads is not None else _default_threads()
    if workers < 1:
        raise UsageError(f"--threads must be >= 1, got {workers}")
    return workers


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def cmd_info(args) -> int:
    g = _load(args)
    cls = classify(g)
    row = stats(g, cls)
    print(f"dataset            {row.name}")
    print(f"vertices (n)       {row.n}")
    print(f"edges (m)          {row.m}   (raw lines: {row.raw_edge_count})")
    print(f"dangling (n_d)     {row.dangling_vertices}")
    print(f"dangling edges     {row.dangling_edges}")
    print(f"avg degree         {row.avg_degree:.2f}")
    print(f"unreferenced       {cls.unreferenced.size}")
    print(f"weak dangling      {cls.weak_dangling.size}")
    print(f"weak unreferenced  {cls.weak_unreferenced.size}")
    out = _outdir(args)
    path = os.path.join(out, "stats.csv")
    serialize.write_stats_csv([row], path)
    print(f"wrote {path}")
    return 0


def cmd_run(args) -> int:
    g = _load(args)
    cfg = _config(args)
    workers = _threads(args)
    out = _outdir(args)

    if args.algo == "spi":
        vec, trace = power_method(g, SolverConfig(cfg.damping, None, cfg.threshold, args.iters),
                                  workers=1)
    elif args.algo == "mpi":
        vec, trace = power_method(g, SolverConfig(cfg.damping, None, cfg.threshold, args.iters),
                                  workers=workers)
    elif args.algo == "fp":
        vec = forward_push_ppr(g, cfg, args.fp_mode).normalized()
        trace = RunTrace(meta={"algorithm": vec.algorithm})
    elif args.algo == "ifp1":
        cls = classify(g)
        vec, trace = ifp1_run(g, cls, cfg, workers=workers, strategy=args.strategy)
    elif args.algo == "ifp2":
        cls = classify(g)
        vec, trace = ifp2_run(preprocess_ifp2(g, cls), cfg, workers=workers,
                              strategy=args.strategy)
    else:  # sync-sim
        vec, trace = sync_simulate(g, cfg, variant=args.variant)

    stem = os.path.join(out, f"{g.name}.{args.algo}")
    serialize.write_ranking_csv(vec, g, stem + ".ranking.csv")
    trace.write_csv(stem + ".trace.csv")
    top = int(np.argmax(vec.values))
    print(f"algorithm={args.algo} n={g.n} m={g.m} threads={workers}")
    print(f"top vertex: id={int(g.original_ids[top])} score={vec.values[top]:.6g}")
    print(f"wrote {stem}.ranking.csv and {stem}.trace.csv")
    return 0


def cmd_sweep(args) -> int:
    g = _load(args)
    cfg = _config(args)
    workers = _threads(args)
    out = _outdir(args)
    cache = os.path.join(out, "refcache")
    if args.threads_list:
        try:
            counts = [int(x) for x in args.threads_list.split(",") if x]
        except ValueError:
            raise UsageError(f"bad --threads-list: {args.threads_list!r}")
        algos = [a for a in args.algos.split(",") if a]
        if len(algos) != 1:
            raise UsageError("parallelism sweep takes exactly one algorithm in --algos")
        rows = bench.sweep_parallelism(g, algos[0], counts, args.xi, cfg,
                                       reps=args.reps, cache_dir=cache)
    else:
        try:
            xis = [float(x) for x in args.xis.split(",") if x]
        except ValueError:
            raise UsageError(f"bad --xis: {args.xis!r}")
        algos = [a for a in args.algos.split(",") if a]
        for a in algos:
            if a not in ("ifp1", "ifp2", "fp", "sync-ifp1", "sync-ifp2", "sync-fp-full"):
                raise UsageError(f"cannot sweep algorithm {a!r}")
        rows = bench.sweep_xi(g, algos, xis, workers, cfg, reps=args.reps, cache_dir=cache)
    path = os.path.join(out, "sweeps.csv")
    bench.write_sweep_csv(rows, path)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def cmd_compare(args) -> int:
    g = _load(args)
    cfg = _config(args)
    workers = _threads(args)
    out = _outdir(args)
    rows = bench.compare_algorithms(g, args.target_err, workers, cfg,
                                    reps=args.reps,
                                    cache_dir=os.path.join(out, "refcache"))
    path = os.path.join(out, "compare.csv")
    bench.write_compare_csv(rows, path)
    for row in rows:
        mark = f"rank {row.rank}" if row.qualified else "unreached"
        print(f"{row.algorithm:>5}: wall={row.wall_s:.4f}s err={row.err:.3g} [{mark}]")
    print(f"wrote {path}")
    return 0


def cmd_synth(args) -> int:
    if args.n < 1 or args.m < 0:
        raise UsageError("synth needs --n >= 1 and --m >= 0")
    out = _outdir(args)
    try:
        g = synth.generate(args.n, args.m, args.dangling_fraction,
                           seed=args.seed, connect=args.connect)
    except ValueError as exc:
        raise UsageError(str(exc))
    path = args.data or os.path.join(out, f"{g.name}.txt")
    synth.write_edge_list(g, path)
    print(f"wrote {path} (n={g.n}, m={g.m})")
    return 0


COMMANDS = {
    "info": cmd_info,
    "run": cmd_run,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
