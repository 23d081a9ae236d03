import io
import os

import numpy as np
import pytest

from pushrank import (
    GraphFormatError,
    classify,
    from_edges,
    load_edge_list,
    preprocess_ifp2,
    stats,
)
from pushrank.graph import dangling_target_counts

import corpus


def test_load_basic():
    g = load_edge_list(b"0 1\n1 2\n")
    assert g.n == 3 and g.m == 2
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_load_comments_dedup_remap():
    g = load_edge_list(b"# c\n5 9\n5 9\n")
    assert g.n == 2 and g.m == 1
    assert g.edge_set() == {(0, 1)}
    assert g.original_ids.tolist() == [5, 9]
    assert g.raw_edge_count == 2


def test_load_first_appearance_order():
    g = load_edge_list(b"7 3\n3 1\n")
    # ids remapped in the order they appear: 7 -> 0, 3 -> 1, 1 -> 2
    assert g.original_ids.tolist() == [7, 3, 1]
    assert g.edge_set() == {(0, 1), (1, 2)}


def test_load_tab_separated_stream():
    g = load_edge_list(io.BytesIO(b"0\t1\n1\t0\n"))
    assert g.m == 2


def test_load_malformed_line_number():
    with pytest.raises(GraphFormatError, match="line 2"):
        load_edge_list(b"0 1\nx 2\n")
    with pytest.raises(GraphFormatError, match="line 3"):
        load_edge_list(b"# head\n0 1\n4\n")


def test_load_empty_errors():
    with pytest.raises(GraphFormatError, match="empty"):
        load_edge_list(b"")
    with pytest.raises(GraphFormatError, match="empty"):
        load_edge_list(b"# only comments\n")


def test_load_negative_id_errors():
    with pytest.raises(GraphFormatError):
        load_edge_list(b"0 1\n-2 1\n")


def test_self_loops_kept_duplicates_dropped():
    g = load_edge_list(b"0 0\n0 1\n0 1\n")
    assert g.m == 2
    assert g.edge_set() == {(0, 0), (0, 1)}
    assert g.out_degree[0] == 2


def test_from_edges_id_range_checked():
    with pytest.raises(ValueError):
        from_edges(2, [0], [2])
    with pytest.raises(ValueError):
        from_edges(0, [], [])


def test_graph_invariants_on_corpus():
    for g in corpus.handcrafted() + corpus.random_corpus(20):
        g.validate()
        assert g.out_offsets[-1] == g.m
        assert np.array_equal(np.diff(g.out_offsets), g.out_degree)
        assert int(g.in_degree.sum()) == g.m


def test_classify_chain():
    cls = classify(corpus.chain3())
    assert cls.dangling.tolist() == [2]
    assert cls.unreferenced.tolist() == [0]
    assert cls.weak_dangling.tolist() == [1]
    assert cls.weak_unreferenced.tolist() == [1]
    assert cls.dangling_edge_count == 1


def test_classify_cycle_all_empty():
    cls = classify(corpus.cycle2())
    assert cls.dangling.size == 0
    assert cls.unreferenced.size == 0
    assert cls.weak_dangling.size == 0
    assert cls.weak_unreferenced.size == 0
    assert cls.dangling_edge_count == 0


def test_classify_deterministic_and_weak_disjoint():
    for g in corpus.random_corpus(15):
        a = classify(g)
        b = classify(g)
        for field in ("dangling", "unreferenced", "weak_dangling", "weak_unreferenced"):
            assert np.array_equal(getattr(a, field), getattr(b, field))
        assert not np.intersect1d(a.dangling, a.weak_dangling).size
        assert not np.intersect1d(a.unreferenced, a.weak_unreferenced).size
        # edges into dangling vertices never exceed the edge count
        assert 0 <= a.dangling_edge_count <= g.m


def test_stats_chain_and_isolated():
    g = corpus.chain3()
    row = stats(g, classify(g))
    assert (row.n, row.m, row.dangling_vertices, row.dangling_edges) == (3, 2, 1, 1)
    assert row.avg_degree == pytest.approx(2 / 3, abs=1e-12)

    lone = corpus.single_vertex()
    row = stats(lone, classify(lone))
    assert (row.n, row.m, row.dangling_vertices, row.dangling_edges) == (1, 0, 1, 0)
    assert row.avg_degree == 0.0


def test_preprocess_chain():
    g = corpus.chain3()
    pg = preprocess_ifp2(g, classify(g))
    assert pg.live_targets[pg.live_offsets[0]:pg.live_offsets[1]].tolist() == [1]
    assert pg.live_degree.tolist() == [1, 0, 0]
    assert pg.dangling_ids.tolist() == [2]
    assert pg.source_ids.tolist() == [1]
    assert pg.dangling_edge_count == 1


def test_preprocess_cycle_identity():
    g = corpus.cycle2()
    pg = preprocess_ifp2(g, classify(g))
    assert np.array_equal(pg.live_targets, g.out_targets)
    assert np.array_equal(pg.live_offsets, g.out_offsets)
    assert pg.dangling_ids.size == 0
    assert pg.source_ids.size == 0


def test_preprocess_fanin_all_edges_invalidated():
    g = corpus.fanin3()
    pg = preprocess_ifp2(g, classify(g))
    assert pg.live_targets.size == 0
    assert pg.source_ids.tolist() == [0, 1]


def test_preprocess_roundtrip_and_degree_split():
    for g in corpus.handcrafted() + corpus.random_corpus(20):
        cls = classify(g)
        pg = preprocess_ifp2(g, cls)
        # live target counts plus dangling target counts give original degrees
        dt = dangling_target_counts(g, cls)
        assert np.array_equal(pg.live_degree + dt, g.out_degree)
        # reconstructing edges from both sides gives exactly the base edge set
        live_src = np.repeat(np.arange(g.n), pg.live_degree)
        live_edges = set(zip(live_src.tolist(), pg.live_targets.tolist()))
        dang_edges = set()
        for i, v in enumerate(pg.dangling_ids.tolist()):
            for u in pg.source_ids[pg.source_offsets[i]:pg.source_offsets[i + 1]].tolist():
                dang_edges.add((u, v))
        assert live_edges | dang_edges == g.edge_set()
        assert len(live_edges) + len(dang_edges) == g.m
        assert pg.source_ids.size == cls.dangling_edge_count
        # push weights stay tied to original degrees
        assert np.array_equal(pg.base.out_degree, g.out_degree)


DATA_DIR = os.environ.get("PUSHRANK_DATA_DIR", "data")
WEB_STANFORD = os.path.join(DATA_DIR, "web-Stanford.txt")


@pytest.mark.skipif(not os.path.exists(WEB_STANFORD),
                    reason="web-Stanford dataset not downloaded")
def test_web_stanford_table_counts():
    g = load_edge_list(WEB_STANFORD)
    cls = classify(g)
    row = stats(g, cls)
    assert (row.n, row.m) == (281903, 2312497)
    assert (row.dangling_vertices, row.dangling_edges) == (172, 410)
    assert row.avg_degree == pytest.approx(8.21, abs=0.01)
