import numpy as np
import pytest

from hmmaxout.cascade import (CascadeError, Interval, build_cascade_graph, dedupe,
                              merge_oversegmented, score_interval, split_undersegmented)
from hmmaxout.imaging import Style, render_word
from hmmaxout.maxout import MaxoutClassifier
from hmmaxout.maxout.presets import small_net

from oracles import cascade_paths, random_cascade


def table_scorer(table):
    return lambda spans: np.array([table[s] for s in spans])


def test_merge_rule():
    a, b = Interval(0, 5, "hmm", 0.4), Interval(5, 9, "hmm", 0.5)
    out = merge_oversegmented([a, b], table_scorer({(0, 9): 0.9}))
    assert out[:2] == [a, b] and out[2].span == (0, 9) and out[2].origin == "merged"
    assert merge_oversegmented([a, b], table_scorer({(0, 9): 0.3})) == [a, b]


def test_split_rule():
    out = split_undersegmented([Interval(0, 10)])
    assert [iv.span for iv in out] == [(0, 10), (0, 5), (5, 10)]
    assert split_undersegmented([Interval(3, 4)]) == [Interval(3, 4)]
    many = [Interval(i * 4, i * 4 + 4) for i in range(5)]
    assert len(split_undersegmented(many)) == 15


def test_dedupe_keeps_max():
    out = dedupe([Interval(0, 4, "hmm", 0.2), Interval(0, 4, "split-left", 0.7)])
    assert len(out) == 1 and out[0].p_correct == 0.7


def test_single_interval_graph():
    g = build_cascade_graph([Interval(0, 10)], 10)
    assert g.V == 1 and g.starts == (0,) and g.ends == (0,) and g.preds == ((),)


def test_graph_errors():
    with pytest.raises(CascadeError):
        build_cascade_graph([], 10)
    with pytest.raises(CascadeError):
        build_cascade_graph([Interval(5, 10)], 10)
    with pytest.raises(CascadeError):
        build_cascade_graph([Interval(0, 4)], 10)


def test_three_row_cascade():
    # HMM row for a 3-character word, plus merges and halving
    hmm = [Interval(0, 10, "hmm", 0.5), Interval(10, 20, "hmm", 0.5), Interval(20, 30, "hmm", 0.5)]
    merged = merge_oversegmented(hmm, lambda spans: np.full(len(spans), 0.9))
    cascade = split_undersegmented(merged)
    g = build_cascade_graph(cascade, 30)
    for k, iv in enumerate(g.intervals):
        if iv.origin == "hmm" and iv.start == 10:
            left = {g.intervals[u].span for u in g.preds[k]}
            assert left == {(0, 10), (5, 10)}  # HMM row and split row ending at column 10
    assert sum(iv.origin == "merged" for iv in g.intervals) == 2


@pytest.mark.parametrize("seed", range(30))
def test_random_graph_properties(seed):
    g = random_cascade(np.random.default_rng(seed))
    for v, ps in enumerate(g.preds):
        assert all(g.intervals[u].start < g.intervals[v].start for u in ps)  # acyclic
        assert v in g.starts or ps
        assert len(ps) <= 8
    paths = cascade_paths(g)
    assert paths
    for p in paths:
        for u, v in zip(p, p[1:]):
            assert abs(g.intervals[u].end - g.intervals[v].start) <= g.gap_tol
    again = build_cascade_graph(list(g.intervals), g.width, g.gap_tol)
    assert again == g


def test_zero_output_scorer_is_one_third():
    img = render_word("ab", Style(), 0).image
    clf = MaxoutClassifier.untrained(small_net(3), zero_output=True)
    assert score_interval(img, 0, 10, clf) == pytest.approx(1 / 3)
    assert score_interval(img, 2, 12, clf) == score_interval(img, 2, 12, clf)


def test_dump_is_json():
    import json

    g = build_cascade_graph([Interval(0, 5), Interval(5, 10)], 10)
    d = json.loads(g.dumps())
    assert d["edges"] == [[0, 1]] and d["starts"] == [0] and d["ends"] == [1]
