"""Cascade construction: segmentation correction, merge/split passes and the induced graph."""
import json
from dataclasses import dataclass

import numpy as np

from .datasets import CORRECT
from .imaging import slice_patch

GAP_TOL = 2


class CascadeError(ValueError):
    """The interval set cannot form a start-to-end lattice."""


@dataclass(frozen=True)
class Interval:
    start: int
    end: int
    origin: str = "hmm"  # hmm | merged | split-left | split-right
    p_correct: float = 1.0

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty interval [{self.start}, {self.end})")
        if not 0.0 <= self.p_correct <= 1.0:
            raise ValueError("p_correct must lie in [0, 1]")

    @property
    def span(self):
        return (self.start, self.end)


@dataclass(frozen=True)
class CascadeGraph:
    intervals: tuple  # sorted by (start, end)
    preds: tuple  # preds[k] = indices of intervals immediately preceding k
    starts: tuple
    ends: tuple
    width: int
    gap_tol: int = GAP_TOL

    @property
    def V(self):
        return len(self.intervals)

    def successors(self):
        succ = [[] for _ in self.intervals]
        for v, ps in enumerate(self.preds):
            for u in ps:
                succ[u].append(v)
        return succ

    def to_json(self):
        return {
            "width": self.width,
            "gap_tol": self.gap_tol,
            "intervals": [{"start": iv.start, "end": iv.end, "origin": iv.origin,
                           "p_correct": iv.p_correct} for iv in self.intervals],
            "edges": [[u, v] for v, ps in enumerate(self.preds) for u in ps],
            "starts": list(self.starts),
            "ends": list(self.ends),
        }

    def dumps(self):
        return json.dumps(self.to_json())


def score_interval(img, start, end, classifier, side=32):
    """Probability that ``[start, end)`` covers exactly one character."""
    return float(score_intervals(img, [(start, end)], classifier, side)[0])


def score_intervals(img, spans, classifier, side=32):
    if not spans:
        return np.zeros(0)
    X = np.stack([slice_patch(img, a, b, side) for a, b in spans])
    return np.clip(classifier.predict_proba(X)[:, CORRECT], 0.0, 1.0)


def merge_oversegmented(intervals, scorer):
    """One left-to-right pass adding the union of each adjacent pair it improves.

    ``scorer`` maps a list of ``(start, end)`` spans to correct-probabilities.
    A joined interval is added when it scores above both constituents; the
    constituents stay in the set.
    """
    intervals = list(intervals)
    pairs = list(zip(intervals[:-1], intervals[1:]))
    if not pairs:
        return intervals
    scores = scorer([(a.start, b.end) for a, b in pairs])
    added = [Interval(a.start, b.end, "merged", float(p))
             for (a, b), p in zip(pairs, scores) if p > a.p_correct and p > b.p_correct]
    return intervals + added


def split_undersegmented(intervals, scorer=None):
    """Add both halves (cut at ``floor((start + end) / 2)``) of every interval of width >= 2."""
    intervals = list(intervals)
    halves = []
    for iv in intervals:
        if iv.end - iv.start < 2:
            continue
        mid = (iv.start + iv.end) // 2
        halves.append((iv.start, mid, "split-left"))
        halves.append((mid, iv.end, "split-right"))
    scores = scorer([(a, b) for a, b, _ in halves]) if (scorer and halves) else [1.0] * len(halves)
    return intervals + [Interval(a, b, o, float(p)) for (a, b, o), p in zip(halves, scores)]


def dedupe(intervals):
    """Collapse identical spans, keeping the highest ``p_correct``."""
    best = {}
    for iv in intervals:
        cur = best.get(iv.span)
        if cur is None or iv.p_correct > cur.p_correct:
            best[iv.span] = iv
    return sorted(best.values(), key=lambda iv: iv.span)


def _links(ivs, width, gap_tol):
    starts = tuple(k for k, iv in enumerate(ivs) if iv.start <= gap_tol)
    ends = tuple(k for k, iv in enumerate(ivs) if iv.end >= width - gap_tol)
    preds = tuple(tuple(u for u, iv in enumerate(ivs)
                        if abs(iv.end - v.start) <= gap_tol and iv.start < v.start)
                  for v in ivs)
    return starts, ends, preds


def build_cascade_graph(intervals, width, gap_tol=GAP_TOL):
    """Precedence graph: ``u -> v`` when ``u`` ends within ``gap_tol`` of ``v``'s start.

    Intervals that no start interval reaches are dropped, so every
    non-start interval keeps at least one predecessor.
    """
    ivs = dedupe(intervals)
    if not ivs:
        raise CascadeError("empty interval set")
    starts, _, preds = _links(ivs, width, gap_tol)
    if not starts:
        raise CascadeError("no interval begins at the left edge")
    live = set(starts)
    for v in range(len(ivs)):  # predecessors always precede v in sorted order
        if any(u in live for u in preds[v]):
            live.add(v)
    if len(live) < len(ivs):
        ivs = [iv for k, iv in enumerate(ivs) if k in live]
        starts, _, preds = _links(ivs, width, gap_tol)
    _, ends, _ = _links(ivs, width, gap_tol)
    if not ends:
        raise CascadeError("no interval reaches the right edge")
    return CascadeGraph(tuple(ivs), preds, starts, ends, int(width), gap_tol)


def build_cascade(img, segmentation, classifier, gap_tol=GAP_TOL, side=32):
    """HMM segmentation -> scored, merged and split cascade graph for one word image."""
    def scorer(spans):
        return score_intervals(img, spans, classifier, side)

    spans = segmentation.absorb_gaps()
    base = [Interval(a, b, "hmm", float(p)) for (a, b), p in zip(spans, scorer(spans))]
    merged = merge_oversegmented(base, scorer)
    cascade = split_undersegmented(merged, scorer)
    return build_cascade_graph(cascade, segmentation.width, gap_tol)
