import math

import numpy as np
import pytest

from hmmaxout.detection import (BRIGHT, DARK, Box, Thresholds, WordBox, cluster_lines, count_hits,
                                dbscan, evaluate_corpus, evaluate_endtoend, extract_msers, hit,
                                nested_word_spans, nms, pr_sweep, word_detect_filter)
from hmmaxout.imaging import GrayImage

from oracles import brute_dbscan, brute_nms


def square_image(bright=False):
    a = np.ones((60, 60))
    a[20:35, 10:30] = 0.0
    return GrayImage(1 - a if bright else a)


def test_mser_single_square():
    regs = extract_msers(square_image())
    dark = [r for r in regs if r.polarity == DARK]
    assert len(dark) == 1
    assert dark[0].box == Box(10, 20, 20, 15) and dark[0].area == 300
    assert not [r for r in regs if r.polarity == BRIGHT]


def test_mser_uniform_is_empty():
    assert extract_msers(GrayImage(np.full((40, 40), 0.5))) == []


def test_mser_polarity_symmetry():
    rng = np.random.default_rng(0)
    a = np.round(rng.uniform(0, 1, (6, 6)) * 255) / 255
    img = np.kron(a, np.ones((8, 8)))
    key = lambda rs, flip: sorted(  # noqa: E731
        (r.box.as_tuple(), r.area, {DARK: BRIGHT, BRIGHT: DARK}[r.polarity] if flip else r.polarity)
        for r in rs)
    assert key(extract_msers(GrayImage(img)), False) == key(extract_msers(GrayImage(1 - img)), True)


def test_mser_area_limits():
    assert extract_msers(square_image(), min_area=400) == []
    assert extract_msers(square_image(), max_area=200) == []


def test_region_mask_matches_runs():
    r = extract_msers(square_image())[0]
    m = r.mask((60, 60))
    assert m.sum() == r.area == len(r.pixels())


@pytest.mark.parametrize("seed", range(10))
def test_dbscan_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 80))
    X = np.concatenate([rng.normal(c, 0.3, (n // 3 + 1, 2)) for c in rng.uniform(-3, 3, (3, 2))])
    eps, k = float(rng.uniform(0.2, 0.8)), int(rng.integers(1, 6))
    labels, core = dbscan(X, eps, k)
    bcore, nclus, noise = brute_dbscan(X, eps, k)
    assert np.array_equal(core, bcore)
    assert len(set(labels.tolist()) - {-1}) == nclus
    assert np.array_equal(labels == -1, noise)


def test_dbscan_errors_and_empty():
    with pytest.raises(ValueError):
        dbscan([[0, 0]], 0, 2)
    with pytest.raises(ValueError):
        dbscan([[0, 0]], 1, 0)
    assert len(dbscan(np.zeros((0, 2)), 1, 2)[0]) == 0


def test_dbscan_precomputed():
    D = np.array([[0, 1, 9], [1, 0, 9], [9, 9, 0]], dtype=float)
    labels, core = dbscan(D, 1.5, 2, metric="precomputed")
    assert labels.tolist() == [0, 0, -1] and core.tolist() == [True, True, False]


def test_cluster_lines_two_rows():
    a = np.ones((120, 200))
    for row in (20, 80):
        for x in range(20, 180, 20):
            a[row:row + 16, x:x + 9] = 0.0
    lines = cluster_lines(extract_msers(GrayImage(a)))
    boxes = [b for b, _ in lines]
    assert Box(20, 20, 149, 16) in boxes and Box(20, 80, 149, 16) in boxes
    assert all(len(m) == 8 for b, m in lines if b.w == 149)


def wb(x, y, w, h, t="a", c=0.0, p=1.0, e=0):
    return WordBox(Box(x, y, w, h), t, c, e, p)


@pytest.mark.parametrize("seed", range(20))
def test_nms_against_brute_force(seed):
    rng = np.random.default_rng(seed)
    boxes = [wb(*rng.integers(0, 50, 2), *rng.integers(1, 30, 2), c=float(rng.normal()))
             for _ in range(int(rng.integers(0, 25)))]
    kept = nms(boxes, 0.3)
    ref = brute_nms([(b.cost_v, b.box.as_tuple()) for b in boxes], 0.3)
    assert kept == [boxes[i] for i in ref]


def test_nms_examples():
    a, b = wb(0, 0, 10, 10, c=-1.0), wb(2, 0, 10, 10, c=-0.5)
    assert nms([a, b]) == [b]
    assert nms([a, wb(50, 0, 10, 10)]) == [wb(50, 0, 10, 10), a]
    assert nms([]) == []


def test_hit_rule():
    t = Box(0, 0, 10, 10)
    assert hit(Box(0, 0, 10, 10), t)
    assert hit(Box(0, 0, 10, 6), t)  # 60 > 0.5 * 100
    assert not hit(Box(0, 0, 10, 5), t)  # 50 is not > 50
    assert not hit(Box(5, 0, 10, 10), t)  # 50 of a 150 union box
    assert hit(Box(0, 0, 10, 6), t, iou=True)


def test_evaluate_examples():
    truth = [((0, 0, 10, 10), "cat"), ((20, 0, 10, 10), "dog")]
    r = evaluate_endtoend([wb(0, 0, 10, 10, "cat"), wb(20, 0, 10, 10, "cot")], truth)
    assert (r.precision, r.recall, r.hits) == (0.5, 0.5, 1) and r.f == pytest.approx(0.5)
    r = evaluate_endtoend([], truth)
    assert r.precision == 0 and r.recall == 0 and r.f == 0
    r = evaluate_endtoend([wb(0, 0, 10, 10, "CAT")], truth, case_sensitive=False)
    assert r.hits == 1 and r.precision == 1.0


def test_one_to_one_matching():
    truth = [((0, 0, 10, 10), "a")]
    preds = [wb(0, 0, 10, 10, "a"), wb(0, 0, 10, 9, "a")]
    assert count_hits(preds, truth) == 1
    # greedy by overlap: the full box takes the full truth first, leaving the
    # lower half (which only qualifies for the full truth) unmatched
    truth = [((0, 0, 10, 10), "a"), ((0, 0, 10, 6), "a")]
    preds = [wb(0, 0, 10, 10, "a"), wb(0, 4, 10, 6, "a")]
    assert count_hits(preds, truth) == 1


def test_corpus_micro_average():
    r = evaluate_corpus([[wb(0, 0, 5, 5, "a")], []], [[((0, 0, 5, 5), "a")], [((0, 0, 5, 5), "b")]])
    assert (r.hits, r.n_pred, r.n_truth) == (1, 1, 2) and r.precision == 1 and r.recall == 0.5


def test_detect_filter():
    cands = [wb(0, 0, 5, 5, p=0.9, e=1), wb(0, 0, 5, 5, p=0.2), wb(0, 0, 5, 5, p=0.9, e=3),
             wb(0, 0, 5, 5, p=0.9, c=-9.0)]
    kept = word_detect_filter(cands, Thresholds(det=0.5, cost_v=-5.0, edit=2))
    assert kept == [cands[0]]
    assert len(word_detect_filter(cands, Thresholds(det=0.0, edit=math.inf))) == 4


@pytest.mark.parametrize("seed", range(10))
def test_pr_sweep_monotone(seed):
    rng = np.random.default_rng(seed)
    truth, cands = [], []
    for _ in range(5):
        t = [((int(x), 0, 20, 10), str(rng.choice(list("ab")))) for x in range(0, 100, 25)]
        c = [wb(int(x + rng.integers(-3, 4)), 0, 20, 10, str(rng.choice(list("ab"))),
                c=float(rng.normal()), p=float(rng.uniform())) for x in range(0, 100, 25)
             for _ in range(int(rng.integers(0, 3)))]
        truth.append(t)
        cands.append(c)
    pts = pr_sweep(cands, truth, np.linspace(0, 1, 21))
    assert [p[0] for p in pts] == sorted(p[0] for p in pts)
    npred = [p[4] for p in pts]
    assert all(0 <= p[1] <= 1 and 0 <= p[2] <= 1 for p in pts)
    assert all(a >= b for a, b in zip(npred, npred[1:]))
    with pytest.raises(ValueError):
        pr_sweep(cands, truth, [])


def test_nested_word_spans():
    words = [(0, 10), (14, 20), (30, 40)]
    gaps = [(10, 14), (20, 30)]
    assert nested_word_spans(words, gaps) == [(0, 40), (0, 20), (30, 40), (0, 10), (14, 20)]
    assert nested_word_spans(words, gaps, max_gaps=0) == [(0, 40)]
    assert nested_word_spans([], []) == []
