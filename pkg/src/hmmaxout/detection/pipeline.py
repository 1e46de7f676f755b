"""Scene text pipeline: lines to word candidates, filtering, NMS and scoring."""
import math
from dataclasses import dataclass, field

import numpy as np

from ..datasets import detect_patch
from ..decoder import StageError, recognize_word
from ..imaging import GrayImage, resize
from ..imaging.font import BASELINE, CAP_TOP, EM_HEIGHT
from .cluster import cluster_lines, plausible_character
from .mser import BRIGHT, Box, extract_msers


@dataclass(frozen=True)
class WordBox:
    box: Box
    transcript: str
    cost_v: float  # mean per-character visual log cost of the decoded word
    edit_dist: int = 0
    p_text: float = 1.0
    raw: str = ""

    def to_record(self):
        return {"box": list(self.box.as_tuple()), "transcript": self.transcript,
                "cost_v": self.cost_v, "edit_dist": self.edit_dist, "p_text": self.p_text}


@dataclass(frozen=True)
class Thresholds:
    det: float = 0.5
    cost_v: float = -math.inf
    edit: float = 2

    def replace(self, **kw):
        return Thresholds(**{**self.__dict__, **kw})


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f: float
    hits: int = 0
    n_pred: int = 0
    n_truth: int = 0
    points: tuple = field(default=())  # (threshold, precision, recall, f)


def _as_box(b):
    return b if isinstance(b, Box) else Box(*map(int, b))


# --- word candidates ------------------------------------------------------

def line_gaps(segmentation):
    """Word intervals and the inter-word gaps between consecutive words."""
    words = [(s, e) for r, s, e in segmentation.intervals if r == 0]
    gaps = [(words[i][1], words[i + 1][0]) for i in range(len(words) - 1)]
    return words, gaps


def nested_word_spans(words, gaps, max_gaps=8):
    """Introduce gaps one at a time, widest first; every stage's spans are kept."""
    if not words:
        return []
    order = sorted(range(len(gaps)), key=lambda i: (-(gaps[i][1] - gaps[i][0]), i))[:max_gaps]
    spans = []
    cuts = []
    for stage in range(len(order) + 1):
        if stage:
            cuts = sorted(cuts + [order[stage - 1]])
        bounds = [words[0][0]] + [x for i in cuts for x in (gaps[i][0], gaps[i][1])] + [words[-1][1]]
        for a, b in zip(bounds[::2], bounds[1::2]):
            if (a, b) not in spans:
                spans.append((a, b))
    return spans


def line_to_words(line_img, line_hmm, max_gaps=8):
    """Nested family of word boxes for a 32-pixel-high line image."""
    seg = line_hmm.segment(line_img)
    words, gaps = line_gaps(seg)
    h = line_img.height
    return [Box(a, 0, b - a, h) for a, b in nested_word_spans(words, gaps, max_gaps)]


@dataclass(frozen=True)
class EmBox:
    """Vertical em-box of a text line and the pixel unit it implies."""

    top: float
    unit: float

    @classmethod
    def from_regions(cls, regions, stroke=0.9):
        # ink reaches half a stroke beyond the glyph skeleton
        tops = min(r.box.y for r in regions)
        base = float(np.median([r.box.y1 for r in regions]))
        unit = max(base - tops, 1.0) / (BASELINE - CAP_TOP + stroke)
        return cls(tops - (CAP_TOP - stroke / 2) * unit, unit)

    def rows(self, shape):
        y0 = int(math.floor(self.top))
        y1 = int(math.ceil(self.top + EM_HEIGHT * self.unit))
        return max(0, y0), min(shape[0], y1)


def _stretch(a):
    lo, hi = np.percentile(a, [2, 98])
    if hi - lo < 1e-6:
        return np.full_like(a, 0.5)
    return np.clip(0.15 + 0.7 * (a - lo) / (hi - lo), 0, 1)


def text_crop(img, em, x0, x1, bright, height=32, margin=1.5):
    """Crop an em-box region, normalise it to dark-on-bright and ``height`` rows."""
    a = img.pixels
    y0, y1 = em.rows(a.shape)
    pad = int(round(margin * em.unit))
    c0, c1 = max(0, x0 - pad), min(a.shape[1], x1 + pad)
    patch = a[y0:y1, c0:c1]
    if bright:
        patch = 1.0 - patch
    scale = height / patch.shape[0]
    w = max(height // 2, int(round(patch.shape[1] * scale)))
    return GrayImage(_stretch(resize(patch, (height, w)))), c0, scale


def _tighten(members, a, b):
    inside = [m for m in members if a <= m.box.x + m.box.w / 2 < b]
    return Box.enclosing(m.box for m in inside) if inside else None


def scene_candidates(img, bundle, mode="edit-distance", lexicon=None, B=100, order=3,
                     mser_params=None, max_gaps=8):
    """Every recognised word candidate of a scene, before filtering and NMS."""
    if not isinstance(img, GrayImage):
        img = GrayImage(img)
    stage = "mser"
    try:
        regions = [r for r in extract_msers(img, **(mser_params or {}))
                   if plausible_character(r, img.shape)]
        stage = "cluster"
        lines = cluster_lines(regions)
    except Exception as err:
        raise StageError(stage, err) from err
    out, seen = [], set()
    for lbox, members in lines:
        bright = members[0].polarity == BRIGHT
        em = EmBox.from_regions(members)
        try:
            line, c0, scale = text_crop(img, em, lbox.x, lbox.x1, bright)
            spans = line_to_words(line, bundle.line_hmm, max_gaps)
        except Exception as err:
            raise StageError("line-to-words", err) from err
        for sp in spans:
            a = c0 + sp.x / scale
            b = c0 + sp.x1 / scale
            box = _tighten(members, a, b)
            if box is None or box in seen:
                continue
            seen.add(box)
            crop, _, _ = text_crop(img, em, box.x, box.x1, bright)
            try:
                word, diag = recognize_word(crop, bundle, mode, B, lexicon, order)
            except StageError:
                continue
            p = float(bundle.detect.predict_proba(detect_patch(crop.pixels)[None])[0, 1]) \
                if bundle.detect is not None else 1.0
            n = max(1, len(diag["raw"]))
            out.append(WordBox(box, word, diag["cost_v"] / n, int(diag["edit_dist"]), p,
                               diag["raw"]))
    return out


# --- filtering and suppression ------------------------------------------

def word_detect_filter(candidates, thresholds=Thresholds()):
    t = thresholds
    return [c for c in candidates
            if c.p_text >= t.det and c.cost_v >= t.cost_v and c.edit_dist <= t.edit
            and c.transcript]


def nms(boxes, overlap_frac=0.30):
    """Greedy suppression by descending ``cost_v`` (input order breaks ties).

    A box is dropped when its intersection with a kept box exceeds
    ``overlap_frac`` of the smaller of the two areas.
    """
    order = sorted(range(len(boxes)), key=lambda i: (-boxes[i].cost_v, i))
    kept = []
    for i in order:
        b = boxes[i].box
        if all(b.intersection(k.box) <= overlap_frac * min(b.area, k.box.area) for k in kept):
            kept.append(boxes[i])
    return kept


def recognize_scene(img, bundle, mode="edit-distance", lexicon=None, thresholds=Thresholds(),
                    B=100, order=3, overlap_frac=0.30):
    cands = scene_candidates(img, bundle, mode, lexicon, B, order)
    return nms(word_detect_filter(cands, thresholds), overlap_frac)


# --- evaluation -----------------------------------------------------------

def hit(pred_box, truth_box, iou=False):
    inter = pred_box.intersection(truth_box)
    if iou:
        return inter > 0.5 * (pred_box.area + truth_box.area - inter)
    return inter > 0.5 * pred_box.union_box(truth_box).area


def _pairs(items):
    for it in items:
        if isinstance(it, WordBox):
            yield it.box, it.transcript
        else:
            b, t = it
            yield _as_box(b), t


def count_hits(preds, truth, iou=False, case_sensitive=True):
    """Greedy one-to-one matching by descending overlap; returns the hit count."""
    P = list(_pairs(preds))
    T = list(_pairs(truth))
    norm = (lambda s: s) if case_sensitive else str.lower
    cand = []
    for i, (pb, pt) in enumerate(P):
        for j, (tb, tt) in enumerate(T):
            if norm(pt) == norm(tt) and hit(pb, tb, iou):
                cand.append((-pb.intersection(tb), i, j))
    cand.sort()
    used_p, used_t = set(), set()
    for _, i, j in cand:
        if i not in used_p and j not in used_t:
            used_p.add(i)
            used_t.add(j)
    return len(used_p)


def _report(hits, n_pred, n_truth, points=()):
    p = hits / n_pred if n_pred else 0.0
    r = hits / n_truth if n_truth else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return EvalReport(p, r, f, hits, n_pred, n_truth, tuple(points))


def evaluate_endtoend(preds, truth, iou=False, case_sensitive=True):
    """Precision, recall and F for one scene; no predictions gives P = 0."""
    preds, truth = list(preds), list(truth)
    return _report(count_hits(preds, truth, iou, case_sensitive), len(preds), len(truth))


def evaluate_corpus(preds_per_scene, truth_per_scene, iou=False, case_sensitive=True):
    """Micro-averaged report over many scenes."""
    h = n_p = n_t = 0
    for preds, truth in zip(preds_per_scene, truth_per_scene):
        preds, truth = list(preds), list(truth)
        h += count_hits(preds, truth, iou, case_sensitive)
        n_p += len(preds)
        n_t += len(truth)
    return _report(h, n_p, n_t)


def pr_sweep(candidates_per_scene, truth_per_scene, grid, thresholds=Thresholds(),
             overlap_frac=0.30, iou=False):
    """Precision/recall over a grid of detection thresholds.

    Suppression runs once on the candidates passing the fixed cost and edit
    thresholds; each grid point then keeps the survivors with
    ``p_text >= threshold``, so the kept set shrinks as the threshold grows.
    """
    if not len(grid):
        raise ValueError("empty threshold grid")
    base = [nms(word_detect_filter(c, thresholds.replace(det=-math.inf)), overlap_frac)
            for c in candidates_per_scene]
    points = []
    for t in sorted(grid):
        kept = [[w for w in b if w.p_text >= t] for b in base]
        rep = evaluate_corpus(kept, truth_per_scene, iou)
        points.append((float(t), rep.precision, rep.recall, rep.f, rep.n_pred))
    return points
