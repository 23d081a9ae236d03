import numpy as np
import pytest

from pushrank import SolverConfig, classify, dense_oracle, ifp1_run
from pushrank import bench
from pushrank.bench import (
    ComparisonRow,
    compare_algorithms,
    fit_loglog_slope,
    max_relative_error,
    reference_vector,
    sweep_parallelism,
    sweep_xi,
)
from pushrank import synth

import corpus


@pytest.fixture(scope="module")
def small_synth():
    return synth.generate(300, 3000, dangling_fraction=0.25, seed=13)


def test_err_zero_for_identical():
    ref = np.array([0.5, 0.5])
    report = max_relative_error(ref.copy(), ref)
    assert report.max_relative_error == 0.0
    assert report.l1_error == 0.0


def test_err_arithmetic():
    report = max_relative_error(np.array([0.45, 0.55]), np.array([0.5, 0.5]))
    assert report.max_relative_error == pytest.approx(0.1, abs=1e-15)
    assert report.l1_error == pytest.approx(0.1, abs=1e-15)
    assert report.worst_vertex in (0, 1)


def test_err_input_validation():
    with pytest.raises(ValueError, match="dimension"):
        max_relative_error(np.ones(3) / 3, np.ones(2) / 2)
    with pytest.raises(ValueError, match="positive"):
        max_relative_error(np.array([0.5, 0.5]), np.array([1.0, 0.0]))


def test_err_engine_bound_from_threshold(chain3):
    cfg = SolverConfig(threshold=1e-6)
    cls = classify(chain3)
    vec, _ = ifp1_run(chain3, cls, cfg)
    dense = dense_oracle(chain3, SolverConfig())
    report = max_relative_error(vec, dense)
    assert report.max_relative_error <= 1e-4


def test_reference_vector_cached(tmp_path, small_synth):
    cache = str(tmp_path / "refs")
    a = reference_vector(small_synth, cache_dir=cache)
    b = reference_vector(small_synth, cache_dir=cache)
    assert np.array_equal(a.values, b.values)
    files = list((tmp_path / "refs").iterdir())
    assert len(files) == 1 and files[0].name.startswith("ref-")


def test_sweep_xi_rows_and_monotonicity(small_synth, tmp_path):
    xis = [1e-4, 1e-6, 1e-8]
    rows = sweep_xi(small_synth, ["ifp1", "ifp2"], xis, workers=2, reps=1,
                    cache_dir=str(tmp_path / "refs"))
    assert len(rows) == 6
    for algo in ("ifp1", "ifp2"):
        errs = [r.err for r in rows if r.algorithm == algo]
        assert errs == sorted(errs, reverse=True)
        assert all(e >= 0 for e in errs)


def test_sweep_xi_slope_near_one(small_synth, tmp_path):
    xis = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
    rows = sweep_xi(small_synth, ["ifp1"], xis, workers=2, reps=1,
                    cache_dir=str(tmp_path / "refs"))
    slope = fit_loglog_slope([r.xi for r in rows], [r.err for r in rows])
    assert 0.7 <= slope <= 1.3


def test_sweep_cycle_all_algorithms_tiny_err(tmp_path):
    g = corpus.cycle2()
    rows = sweep_xi(g, ["ifp1", "ifp2", "sync-ifp1", "fp"], [1e-12], workers=2,
                    reps=1, cache_dir=str(tmp_path / "refs"))
    assert all(r.err <= 1e-10 for r in rows)


def test_sweep_parallelism_err_invariant(small_synth, tmp_path):
    xi = 1e-10
    rows = sweep_parallelism(small_synth, "ifp1", [1, 2, 4], xi, reps=1,
                             cache_dir=str(tmp_path / "refs"))
    assert len(rows) == 3
    errs = [r.err for r in rows]
    assert max(errs) - min(errs) <= 5 * xi
    import os
    for r in rows:
        assert r.oversubscribed == (r.threads > (os.cpu_count() or 1))


def test_compare_trivial_target_all_qualify(small_synth, tmp_path):
    rows = compare_algorithms(small_synth, target_err=1.0, workers=2, reps=1,
                              cache_dir=str(tmp_path / "refs"))
    assert len(rows) == 4
    assert all(r.qualified for r in rows)
    ranks = sorted(r.rank for r in rows)
    assert ranks == [1, 2, 3, 4]


def test_compare_unreachable_target_flagged(small_synth, tmp_path):
    rows = compare_algorithms(small_synth, target_err=1e-30, workers=2, reps=1,
                              cache_dir=str(tmp_path / "refs"))
    assert all(not r.qualified for r in rows)
    assert all(r.rank is None for r in rows)
    assert all(r.setting == "unreached" for r in rows)


def test_vector_binary_roundtrip(tmp_path):
    from pushrank import PageRankVector
    from pushrank.serialize import read_vector_binary, write_vector_binary

    values = np.array([0.25, 0.5, 0.125, 0.125])
    path = tmp_path / "vec.bin"
    write_vector_binary(PageRankVector(values, "test", 0.85), path)
    assert path.stat().st_size == 8 + 8 * 4  # int64 length + doubles
    back = read_vector_binary(path)
    assert np.array_equal(back, values)


def test_csv_writers(tmp_path, small_synth):
    rows = sweep_xi(small_synth, ["ifp1"], [1e-6], workers=1, reps=1,
                    cache_dir=str(tmp_path / "refs"))
    sweep_path = tmp_path / "sweeps.csv"
    bench.write_sweep_csv(rows, sweep_path)
    lines = sweep_path.read_text().strip().splitlines()
    assert lines[0] == ",".join(bench.SWEEP_CSV_HEADER)
    assert len(lines) == 2

    crows = [ComparisonRow("d", "ifp1", 1e-3, 1e-4, 0.5, 0.01, "xi=0.001", True, 1)]
    cmp_path = tmp_path / "compare.csv"
    bench.write_compare_csv(crows, cmp_path)
    lines = cmp_path.read_text().strip().splitlines()
    assert lines[0] == ",".join(bench.COMPARE_CSV_HEADER)
    assert len(lines) == 2
