import io
import json

import numpy as np
import pytest

from hmmaxout.cascade import Interval, build_cascade_graph
from hmmaxout.decoder import (DecodeError, EmissionTable, bigram_tables, cascade_beam_search,
                              beam_dump_writer, decode_exact_bigram, decode_exact_nolm,
                              path_score)
from hmmaxout.lm import Lexicon, build_ngram

from decoder_cases import hypothesis_count, instance, queues
from oracles import brute_decode


def chain(V, w=10):
    return build_cascade_graph([Interval(i * w, (i + 1) * w) for i in range(V)], V * w)


def fork():
    """One wide interval against two halves over the same 40 columns."""
    return build_cascade_graph([Interval(0, 40), Interval(0, 20), Interval(20, 40)], 40)


def table(pc, pv, alphabet="ab"):
    return EmissionTable.from_probs(np.array(pc), np.array(pv), alphabet)


def test_emission_shape_errors():
    with pytest.raises(ValueError):
        table([[0.5, 0.5]], [1.0, 1.0])
    with pytest.raises(DecodeError):
        decode_exact_nolm(chain(2), table([[0.5, 0.5]], [1.0]))


def test_single_interval():
    e = table([[0.2, 0.8]], [0.9])
    w, s, path = decode_exact_nolm(chain(1), e)
    assert w == "b" and path == (0,) and s == pytest.approx(np.log(0.8 * 0.9))


def test_prefers_high_pv_path():
    # one wide interval vs two narrow ones over the same columns
    g = fork()
    pc = [[0.9, 0.1]] * 3
    e = table(pc, [0.9 if iv.span == (0, 40) else 0.3 for iv in g.intervals])
    assert decode_exact_nolm(g, e)[0] == "a"
    e = table(pc, [0.1 if iv.span == (0, 40) else 0.99 for iv in g.intervals])
    assert decode_exact_nolm(g, e)[0] == "aa"


@pytest.mark.parametrize("seed", range(40))
def test_exact_matches_brute_force(seed):
    g, e, m = instance(seed)
    (path, chars), s = brute_decode(g, e)
    w, s2, p2 = decode_exact_nolm(g, e)
    assert abs(s - s2) <= 1e-9
    assert w == "".join(e.alphabet[c] for c in chars)
    (path, chars), s = brute_decode(g, e, bigram_tables(m, e.alphabet))
    w, s2, p2 = decode_exact_bigram(g, e, m)
    assert abs(s - s2) <= 1e-9 and p2 == path
    assert path_score(e, p2, w, m) == pytest.approx(s2, abs=1e-9)


def test_bigram_needs_order_two():
    g, e, _ = instance(0)
    with pytest.raises(ValueError):
        decode_exact_bigram(g, e, build_ngram(Lexicon(frozenset(["ab"])), 3, alphabet=e.alphabet))
    with pytest.raises(ValueError):
        decode_exact_bigram(g, e, build_ngram(Lexicon(frozenset(["ab"])), 2))


@pytest.mark.parametrize("seed", range(20))
def test_wide_beam_is_exact(seed):
    g, e, m = instance(seed)
    r = cascade_beam_search(g, e, m, B=hypothesis_count(g, len(e.alphabet)))
    w, s, path = decode_exact_bigram(g, e, m)
    assert r.best.text == w and abs(r.best.log_cost - s) <= 1e-9
    for h in r:
        assert path_score(e, h.path, h.text, m) == pytest.approx(h.log_cost, abs=1e-9)
    assert len(set(r.texts())) == len(r)


@pytest.mark.parametrize("order", [0, 1])
@pytest.mark.parametrize("seed", range(15))
def test_separable_beams_nest(seed, order):
    g, e, m = instance(seed, order=order)
    prev_q, prev_cost = None, -np.inf
    for B in (1, 2, 4, 8, 16, 32):
        res, q = queues(g, e, m, B)
        if prev_q is not None:
            for k in q:
                assert {h.text for h in prev_q[k]} <= {h.text for h in q[k]}
        assert res.best.log_cost >= prev_cost - 1e-12
        prev_q, prev_cost = q, res.best.log_cost


def test_greedy_chain():
    # with B = 1 on a chain the beam picks the per-interval argmax
    rng = np.random.default_rng(3)
    pc = rng.dirichlet(np.ones(2), size=5)
    r = cascade_beam_search(chain(5), table(pc, np.ones(5)), None, B=1)
    assert r.best.text == "".join("ab"[i] for i in pc.argmax(1))
    assert len(r) == 1


def test_constant_shift_on_chain():
    # every hypothesis on a chain has the same length, so a constant added to
    # every log p_v leaves the ranking unchanged
    rng = np.random.default_rng(4)
    pc = rng.dirichlet(np.ones(3), size=4)
    e = table(pc, rng.uniform(0.2, 1, 4), "abc")
    g = chain(4)
    shifted = EmissionTable(e.log_pc, e.log_pv - 2.5, e.alphabet)
    a, b = cascade_beam_search(g, e, None, 12), cascade_beam_search(g, shifted, None, 12)
    assert a.texts() == b.texts()
    assert np.allclose([h.log_cost for h in a], [h.log_cost + 10.0 for h in b])


def test_length_normalization_ranks_by_mean():
    g = fork()
    pv = [0.3 if iv.span == (0, 40) else 0.5 for iv in g.intervals]
    e = table([[0.9, 0.1]] * 3, pv)
    plain = cascade_beam_search(g, e, None, 10)
    norm = cascade_beam_search(g, e, None, 10, normalize_length=True)
    assert plain.best.text == "a"  # log .27 > log .2025
    assert norm.best.text == "aa"  # mean log .45 > log .27


def test_beam_errors():
    g, e, _ = instance(1)
    with pytest.raises(ValueError):
        cascade_beam_search(g, e, None, B=0)
    with pytest.raises(ValueError):
        cascade_beam_search(g, e, build_ngram(Lexicon(frozenset(["ab"])), 2), B=2)


def test_dump_lines():
    g, e, m = instance(2)
    buf = io.StringIO()
    cascade_beam_search(g, e, m, 3, dump=beam_dump_writer(buf))
    rows = [json.loads(l) for l in buf.getvalue().splitlines()]
    assert [r["interval"] for r in rows] == list(range(g.V))
    assert all(len(r["queue"]) <= 3 for r in rows)
    for r in rows:
        costs = [q["log_cost"] for q in r["queue"]]
        assert costs == sorted(costs, reverse=True)
