"""Acceptance suite: one test per release criterion, one printed verdict
line each (run with ``pytest tests/test_acceptance.py -v -s``).

The desk-scale synthetic graphs stand in for the web crawls the original
measurements used; correctness criteria gate the build, the wall-time
ordering criterion is logged but never gates (it depends on the machine).
"""

import itertools
import os
import time

import numpy as np
import pytest

from pushrank import (
    SolverConfig,
    classify,
    dense_oracle,
    forward_push_ppr,
    ifp1_run,
    ifp2_run,
    power_method,
    preprocess_ifp2,
    series_pagerank,
    sync_simulate,
)
from pushrank import bench, synth
from pushrank._backend import available_backends

import corpus

DAMPING = 0.85


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def synth20():
    g = synth.generate(10_000, 100_000, dangling_fraction=0.2, seed=42)
    cls = classify(g)
    return g, cls, preprocess_ifp2(g, cls)


@pytest.fixture(scope="module")
def synth50():
    return synth.generate(10_000, 100_000, dangling_fraction=0.5, seed=42)


@pytest.fixture(scope="module")
def reference20(synth20):
    g, _, _ = synth20
    return bench.reference_vector(g, SolverConfig())


def test_criterion_1_oracle_equivalence():
    t0 = time.perf_counter()
    graphs = corpus.handcrafted() + corpus.random_corpus(100)
    xi = 1e-12
    push_cfg = SolverConfig(threshold=xi)
    plain = SolverConfig()
    worst = 0.0
    for g in graphs:
        cls = classify(g)
        pg = preprocess_ifp2(g, cls)
        dense = dense_oracle(g, plain)
        vectors = [
            dense.values,
            power_method(g, SolverConfig(max_iterations=210))[0].values,
            series_pagerank(g, plain, terms=200).values,
            forward_push_ppr(g, push_cfg, "redistribute").normalized().values,
        ]
        for workers in (1, 2, 4, 8):
            vectors.append(ifp1_run(g, cls, push_cfg, workers=workers)[0].values)
        for workers in (1, 4):
            vectors.append(ifp2_run(pg, push_cfg, workers=workers)[0].values)
        vectors.append(sync_simulate(g, push_cfg, variant="ifp1", cls=cls)[0].values)
        vectors.append(sync_simulate(pg, push_cfg, variant="ifp2")[0].values)
        vectors.append(sync_simulate(g, push_cfg, variant="fp-full", cls=cls)[0].values)
        for a, b in itertools.combinations(vectors, 2):
            worst = max(worst, float(np.max(np.abs(a - b) / dense.values)))
    elapsed = time.perf_counter() - t0
    _report(
        "criterion-1 oracle equivalence",
        worst <= 1e-8 and elapsed < 60.0,
        f"{len(graphs)} graphs x 12 routes, worst pairwise ERR {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_2_error_law(synth20, reference20, tmp_path):
    t0 = time.perf_counter()
    g, _, _ = synth20
    xis = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10]
    rows = bench.sweep_xi(g, ["ifp1", "ifp2"], xis, workers=2, reps=1,
                          cache_dir=str(tmp_path / "refs"))
    ok = True
    details = []
    for algo in ("ifp1", "ifp2"):
        algo_rows = [r for r in rows if r.algorithm == algo]
        slope = bench.fit_loglog_slope([r.xi for r in algo_rows],
                                       [r.err for r in algo_rows])
        bounded = all(r.err <= 100.0 * r.xi for r in algo_rows)
        ok = ok and (0.7 <= slope <= 1.3) and bounded
        details.append(f"{algo}: slope {slope:.3f}, ERR<=100*xi {bounded}")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 120.0
    _report("criterion-2 error law", ok, "; ".join(details) + f", {elapsed:.1f}s")


def _decay_stats(g, xi=1e-10):
    _, trace = sync_simulate(g, SolverConfig(threshold=xi), variant="fp-full")
    s = trace.samples
    law_worst = 0.0
    for i in range(len(s) - 1):
        if s[i].active_mass > 0:
            adjusted = (s[i + 1].h_l1 - s[i].carry_mass) / s[i].active_mass
            law_worst = max(law_worst, abs(adjusted - DAMPING * s[i].alpha))
    window = [i for i in range(len(s) - 1)
              if s[i].h_l1 > 0 and s[i].carry_mass <= 1e-6 * s[i].h_l1]
    ratios = [s[i + 1].h_l1 / s[i].h_l1 for i in window]
    return law_worst, window, ratios


def test_criterion_3_convergence_law(synth20, synth50):
    # ratio bounds are checked over the iterations before threshold
    # carryover appears (frozen sub-threshold residue dominates the tail of
    # any thresholded run); the exact decay law holds at every iteration
    g20 = synth20[0]
    law20, win20, ratios20 = _decay_stats(g20)
    law50, win50, ratios50 = _decay_stats(synth50)
    ok = (
        law20 <= 1e-9 and law50 <= 1e-9
        and len(win20) >= 10 and len(win50) >= 10
        and max(ratios20) <= DAMPING + 1e-12
        and max(ratios50) < 0.80
    )
    _report(
        "criterion-3 convergence law",
        ok,
        f"law residual {max(law20, law50):.2e}; 20%-dangling ratio<= {max(ratios20):.4f} "
        f"over {len(win20)} iters; 50%-dangling ratio<= {max(ratios50):.4f} "
        f"over {len(win50)} iters (bound 0.80)",
    )


def test_criterion_4_work_saving(synth20):
    xi_cfg = SolverConfig(threshold=1e-10)
    checked = 0
    for g in corpus.handcrafted() + corpus.random_corpus(30):
        cls = classify(g)
        pg = preprocess_ifp2(g, cls)
        _, t1 = ifp1_run(g, cls, xi_cfg, workers=2)
        _, t2 = ifp2_run(pg, xi_cfg, workers=2)
        assert t2.final.push_ops_dangling == cls.dangling_edge_count
        assert t1.final.push_ops_dangling >= cls.dangling_edge_count
        checked += 1
    g, cls, pg = synth20
    _, t1 = ifp1_run(g, cls, xi_cfg, workers=2, sample_every=float("inf"))
    _, t2 = ifp2_run(pg, xi_cfg, workers=2, sample_every=float("inf"))
    m_d = cls.dangling_edge_count
    ok = (t2.final.push_ops_dangling == m_d
          and t1.final.push_ops_dangling > 2 * m_d)
    _report(
        "criterion-4 work saving",
        ok,
        f"{checked} graphs exact; synthetic m_d={m_d}, one-phase dangling pushes "
        f"{t1.final.push_ops_dangling} (> 2*m_d), two-phase {t2.final.push_ops_dangling}",
    )


def test_criterion_5_precision_floor(synth20, reference20):
    g, cls, _ = synth20
    errs = {}
    for xi in (1e-15, 1e-16):
        vec, _ = ifp1_run(g, cls, SolverConfig(threshold=xi), workers=2,
                          sample_every=float("inf"))
        errs[xi] = bench.max_relative_error(vec, reference20).max_relative_error
    ratio = errs[1e-16] / errs[1e-15]
    ok = 0.1 <= ratio <= 10.0
    _report(
        "criterion-5 precision floor",
        ok,
        f"ERR(1e-15)={errs[1e-15]:.2e}, ERR(1e-16)={errs[1e-16]:.2e}, ratio {ratio:.2f}",
    )


def test_criterion_6_determinism_and_k_invariance(synth20):
    g, cls, pg = synth20
    sync_cfg = SolverConfig(threshold=1e-10)
    a_vec, a_tr = sync_simulate(g, sync_cfg, variant="ifp1", cls=cls)
    b_vec, b_tr = sync_simulate(g, sync_cfg, variant="ifp1", cls=cls)
    bit_identical = (np.array_equal(a_vec.values, b_vec.values)
                     and a_tr.column("h_l1") == b_tr.column("h_l1")
                     and a_tr.column("push_ops") == b_tr.column("push_ops"))

    xi = 1e-12
    cfg = SolverConfig(threshold=xi)
    worst = 0.0
    for run, prep in (("one-phase", None), ("two-phase", pg)):
        outs = {}
        for workers in (1, 4, 8):
            if prep is None:
                vec, _ = ifp1_run(g, cls, cfg, workers=workers, sample_every=float("inf"))
            else:
                vec, _ = ifp2_run(prep, cfg, workers=workers, sample_every=float("inf"))
            outs[workers] = vec.values
        for workers in (4, 8):
            worst = max(worst, float(np.max(np.abs(outs[workers] - outs[1]))))
    ok = bit_identical and worst <= 5 * xi
    _report(
        "criterion-6 determinism / K-invariance",
        ok,
        f"sync bit-identical {bit_identical}; max cross-K component diff {worst:.2e} "
        f"(bound {5 * xi:g})",
    )


@pytest.mark.skipif("c" not in available_backends(),
                    reason="desk-scale timing needs the compiled backend")
def test_criterion_7_directional_performance(tmp_path):
    # non-gating: the ordering is logged, not asserted (machine-dependent)
    t0 = time.perf_counter()
    g = synth.generate(1_000_000, 10_000_000, dangling_fraction=0.3,
                       seed=11, skew=1.0, chain_fraction=0.15)
    workers = os.cpu_count() or 2
    rows = bench.compare_algorithms(g, target_err=1e-3, workers=workers, reps=3,
                                    cache_dir=str(tmp_path / "refs"))
    by_name = {r.algorithm: r for r in rows}
    assert all(r.qualified for r in rows), "every algorithm must reach ERR<1e-3"
    wall = {name: by_name[name].wall_s for name in ("spi", "mpi", "ifp1", "ifp2")}
    ordered = wall["ifp2"] <= wall["ifp1"] < wall["mpi"] < wall["spi"]
    elapsed = time.perf_counter() - t0
    detail = (f"wall(s): ifp2={wall['ifp2']:.2f} ifp1={wall['ifp1']:.2f} "
              f"mpi={wall['mpi']:.2f} spi={wall['spi']:.2f}; workers={workers}; "
              f"total {elapsed:.0f}s")
    print(f"[{'PASS' if ordered else 'WARN'}] criterion-7 wall-time ordering "
          f"(non-gating): {detail}")
