"""Acceptance suite: one test per primary criterion, each printing a pass/fail line.

The three synthetic gates use the session bundle from ``conftest.py``, which
is trained on first use (about a quarter of an hour on one core) and cached.
"""
import time

import numpy as np
import pytest

from hmmaxout.alphabet import ALPHABET
from hmmaxout.decoder import (bigram_tables, cascade_beam_search, decode_cascade,
                              decode_exact_bigram, decode_exact_nolm)
from hmmaxout.detection import (Thresholds, dbscan, evaluate_corpus, nms, pr_sweep,
                                scene_candidates, word_detect_filter)
from hmmaxout.hmm import hmm_viterbi
from hmmaxout.lm import Lexicon, build_ngram, edit_distance, ngram_prob

from decoder_cases import hypothesis_count, instance, queues
from hmm_cases import FixedPosteriors, oracle_score, random_instance
from oracles import brute_dbscan, brute_decode, edit_distance_table, gradcheck

N_DECODE = 200


def test_exact_decoders_match_brute_force(criterion):
    t0 = time.perf_counter()
    worst, words_ok = 0.0, True
    for seed in range(N_DECODE):
        g, e, m = instance(seed)
        for (path, chars), s, (w, s2, _) in (
                (*brute_decode(g, e), decode_exact_nolm(g, e)),
                (*brute_decode(g, e, bigram_tables(m, e.alphabet)), decode_exact_bigram(g, e, m))):
            worst = max(worst, abs(s - s2))
            words_ok &= w == "".join(e.alphabet[c] for c in chars)
    dt = time.perf_counter() - t0
    criterion(worst <= 1e-9 and words_ok and dt < 10.0,
              f"{N_DECODE} cascades, max |score diff| {worst:.1e} (tol 1e-9), words match "
              f"{words_ok}, {dt:.2f} s (limit 10 s)")


def test_wide_beam_equals_exact_bigram(criterion):
    worst, words_ok = 0.0, True
    for seed in range(N_DECODE):
        g, e, m = instance(seed)
        r = cascade_beam_search(g, e, m, B=hypothesis_count(g, len(e.alphabet)))
        w, s, _ = decode_exact_bigram(g, e, m)
        worst = max(worst, abs(r.best.log_cost - s))
        words_ok &= r.best.text == w
    criterion(worst <= 1e-9 and words_ok,
              f"{N_DECODE} cascades, top-1 words match {words_ok}, max |score diff| {worst:.1e}")


def test_beam_monotonicity(criterion):
    nest_fail, cost_fail = 0, 0
    for seed in range(50):
        g, e, _ = instance(seed, order=0)
        prev_q, prev = None, -np.inf
        for B in (1, 2, 4, 8, 16, 32):
            res, q = queues(g, e, None, B)
            if prev_q is not None and any(
                    not {h.text for h in prev_q[k]} <= {h.text for h in q[k]} for k in q):
                nest_fail += 1
            if res.best.log_cost < prev - 1e-12:
                cost_fail += 1
            prev_q, prev = q, res.best.log_cost
    criterion(nest_fail == 0 and cost_fail == 0,
              f"50 cascades x B in 1..32: nesting violations {nest_fail}, "
              f"top-1 cost decreases {cost_fail}")


def test_hmm_viterbi_matches_enumeration(criterion):
    worst, paths_ok = 0.0, True
    for seed in range(200):
        rng = np.random.default_rng(10_000 + seed)
        topo, trans, prior, post, frames = random_instance(rng, max_states=8, max_frames=6)
        al = hmm_viterbi(frames, FixedPosteriors(post), trans, prior, topo)
        seq, best = oracle_score(topo, trans, prior, post)
        worst = max(worst, abs(al.log_score - best))
        paths_ok &= tuple(al.states) == seq
    criterion(worst <= 1e-9 and paths_ok,
              f"200 instances, max |score diff| {worst:.1e}, state paths match {paths_ok}")


def test_gradient_checks(criterion):
    t0 = time.perf_counter()
    errs = {kind: gradcheck(kind, seed=3, n_coords=100, h=1e-5)
            for kind in ("conv_maxout", "dense_maxout", "softmax")}
    dt = time.perf_counter() - t0
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    criterion(max(errs.values()) <= 1e-4 and dt < 60.0,
              f"worst relative error per layer: {detail} (tol 1e-4), {dt:.1f} s (limit 60 s)")


def _random_word(rng, max_len=12):
    return "".join(rng.choice(list(ALPHABET), int(rng.integers(0, max_len + 1))))


def test_edit_distance(criterion):
    rng = np.random.default_rng(62)
    mismatches = sum(edit_distance(a, b) != edit_distance_table(a, b)
                     for a, b in ((_random_word(rng), _random_word(rng)) for _ in range(500)))
    axioms = 0
    for _ in range(500):
        a, b, c = _random_word(rng), _random_word(rng), _random_word(rng)
        if rng.random() < 0.2:
            b = a
        d_ab, d_ba, d_ac, d_bc = (edit_distance(a, b), edit_distance(b, a), edit_distance(a, c),
                                  edit_distance(b, c))
        ok = d_ab >= 0 and (d_ab == 0) == (a == b) and d_ab == d_ba and d_ac <= d_ab + d_bc
        axioms += not ok
    criterion(mismatches == 0 and axioms == 0,
              f"500 pairs: {mismatches} oracle mismatches; 500 triples: {axioms} axiom violations")


def test_lm_normalization(criterion):
    rng = np.random.default_rng(5)
    words = set()
    while len(words) < 1000:
        words.add("".join(rng.choice(list(ALPHABET), int(rng.integers(1, 10)))))
    lex = Lexicon(frozenset(words))
    worst = 0.0
    for order in range(1, 6):
        m = build_ngram(lex, order)
        for _ in range(100):
            ctx = _random_word(rng, 8)
            total = sum(ngram_prob(m, c, ctx) for c in ALPHABET)
            worst = max(worst, abs(total - 1.0))
    criterion(worst <= 1e-9, f"orders 1-5 x 100 contexts, max |sum - 1| {worst:.1e} (tol 1e-9)")


def test_dbscan_oracle(criterion):
    bad = 0
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 201))
        centres = rng.uniform(-5, 5, (int(rng.integers(1, 6)), 2))
        X = centres[rng.integers(len(centres), size=n)] + rng.normal(0, 0.6, (n, 2))
        eps, k = float(rng.uniform(0.1, 1.0)), int(rng.integers(1, 8))
        labels, core = dbscan(X, eps, k)
        bcore, nclus, _ = brute_dbscan(X, eps, k)
        bad += not (np.array_equal(core, bcore) and len(set(labels.tolist()) - {-1}) == nclus)
    criterion(bad == 0, f"50 point sets (n <= 200): {bad} core-set or cluster-count mismatches")


@pytest.mark.slow
def test_character_gate(bundle, timings, criterion):
    from hmmaxout.datasets import char_dataset

    # clean: exact glyph spans (no jitter), unseen seed
    X, y = char_dataset(20, seed=424242, jitter=0)
    acc = float((bundle.char.predict(X) == y).mean())
    minutes = timings["char"] / 60
    criterion(acc >= 0.95 and minutes <= 15,
              f"held-out accuracy {acc:.3f} (need 0.95) on {len(y)} glyphs, "
              f"trained in {minutes:.1f} CPU-min (limit 15)")


@pytest.mark.slow
def test_word_gate(bundle, criterion):
    from hmmaxout.cli import word_sweep
    from hmmaxout.datasets import lexicon_for, word_samples

    rng = np.random.default_rng(5)
    prepared = []
    for s in word_samples(200, seed=12345):
        lex = Lexicon(frozenset(lexicon_for(s.text, 50, rng)))
        g, e = decode_cascade(s.image, bundle)
        prepared.append({"g": g, "e": e, "lex": lex, "truth": s.text})
    rows = {B: (acc, ms) for B, acc, ms in word_sweep(prepared, "beam", [1, 100], "edit-distance")}
    (a1, l1), (a100, l100) = rows[1], rows[100]
    criterion(a100 >= 0.80 and abs(a1 - a100) <= 0.05 and l1 < l100,
              f"accuracy B=100 {a100:.3f} (need 0.80), B=1 {a1:.3f} (within 0.05), "
              f"latency {l1:.2f} ms < {l100:.2f} ms")


@pytest.mark.slow
def test_end_to_end_gate(bundle, criterion):
    from hmmaxout.datasets import easy_scene, scene_lexicon

    rng = np.random.default_rng(2024)
    cands, truth = [], []
    for sd in np.random.default_rng(77).integers(2 ** 31, size=50):
        s = easy_scene(int(sd))
        lex = Lexicon(frozenset(scene_lexicon([t for _, t in s.truth], 50, rng)))
        cands.append(scene_candidates(s.image, bundle, "edit-distance", lex))
        truth.append(s.truth)
    preds = [nms(word_detect_filter(c, Thresholds())) for c in cands]
    rep = evaluate_corpus(preds, truth)
    pts = pr_sweep(cands, truth, np.linspace(0, 1, 21))
    ts, recall, npred = ([p[i] for p in pts] for i in (0, 2, 4))
    # monotone-threshold curve: the kept set can only shrink as the threshold rises
    monotone = ts == sorted(ts) and all(a >= b for a, b in zip(npred, npred[1:]))
    recall_mono = all(a >= b for a, b in zip(recall, recall[1:]))
    criterion(rep.f >= 0.70 and monotone,
              f"50 scenes: P {rep.precision:.3f} R {rep.recall:.3f} F {rep.f:.3f} (need 0.70); "
              f"PR sweep over {len(pts)} thresholds: kept count non-increasing {monotone}, "
              f"recall non-increasing {recall_mono}")
