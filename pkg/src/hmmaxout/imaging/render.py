"""Deterministic synthetic word, line and scene generator."""
import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy import ndimage

from ..alphabet import ALPHABET, check_text
from . import font
from .image import GrayImage

WORD_HEIGHT = 32


@dataclass(frozen=True)
class Style:
    """Rendering parameters, in font units unless noted."""

    height: int = WORD_HEIGHT  # pixels
    stroke: float = 0.9
    stroke_jitter: float = 0.15
    slant: float = 0.0
    slant_jitter: float = 0.08
    spacing: float = 1.0  # the kerning unit
    spacing_jitter: float = 0.3
    glyph_jitter: float = 0.12
    word_spacing: float = 3.2
    margin: float = 1.5
    noise: float = 0.03  # std of additive Gaussian noise, intensity units
    blur: float = 0.4  # max Gaussian blur sigma, pixels
    background: tuple = (0.65, 0.95)
    foreground: tuple = (0.02, 0.35)

    @classmethod
    def clean(cls, height=WORD_HEIGHT):
        return cls(height=height, stroke_jitter=0.0, slant_jitter=0.0, spacing_jitter=0.0,
                   glyph_jitter=0.0, noise=0.0, blur=0.0,
                   background=(0.9, 0.9), foreground=(0.1, 0.1))

    @property
    def unit(self):
        return self.height / font.EM_HEIGHT


@dataclass(frozen=True, eq=False)
class WordSample:
    image: GrayImage
    text: str
    char_spans: list  # [(start, end)] column intervals tiling [0, width)
    seed: object = None

    def to_record(self):
        return {"text": self.text, "spans": [list(s) for s in self.char_spans], "seed": self.seed}


@dataclass(frozen=True, eq=False)
class LineSample:
    image: GrayImage
    words: list
    word_spans: list  # tiling spans, one per word
    ink_spans: list  # tight ink extents, one per word
    seed: object = None

    def to_record(self):
        return {"words": list(self.words), "spans": [list(s) for s in self.word_spans],
                "ink": [list(s) for s in self.ink_spans], "seed": self.seed}


@dataclass(frozen=True, eq=False)
class SceneSample:
    image: GrayImage
    truth: list = field(default_factory=list)  # [((x, y, w, h), text)]
    seed: object = None

    def to_record(self):
        return {"boxes": [list(b) for b, _ in self.truth], "texts": [t for _, t in self.truth],
                "seed": self.seed}


def dumps_records(samples):
    """JSON-lines ground truth, one record per sample."""
    return "".join(json.dumps(s.to_record()) + "\n" for s in samples)


# ---------------------------------------------------------------- raster


def _coverage(segs, thick, shape, x0):
    """Anti-aliased stroke coverage of pixel-space segments on a column window."""
    h, w = shape
    ys = np.arange(h) + 0.5
    xs = np.arange(w) + 0.5 + x0
    px = xs[None, :, None]
    py = ys[:, None, None]
    a = segs[:, 0, :]
    d = segs[:, 1, :] - a
    ll = np.maximum((d ** 2).sum(axis=1), 1e-12)
    t = ((px - a[:, 0]) * d[:, 0] + (py - a[:, 1]) * d[:, 1]) / ll
    t = np.clip(t, 0.0, 1.0)
    dist = np.hypot(px - (a[:, 0] + t * d[:, 0]), py - (a[:, 1] + t * d[:, 1])).min(axis=2)
    return np.clip(thick / 2.0 - dist + 0.5, 0.0, 1.0)


def _layout(tokens, style, rng):
    """Place glyphs; ``tokens`` is a list of words. Returns placement records."""
    u = style.unit
    thick = style.stroke + (rng.uniform(-1, 1) * style.stroke_jitter if style.stroke_jitter else 0.0)
    slant = style.slant + (rng.uniform(-1, 1) * style.slant_jitter if style.slant_jitter else 0.0)
    glyphs = []  # (word index, char, segments in units, box_l, box_r)
    cursor = 0.0
    for wi, word in enumerate(tokens):
        if wi:
            cursor += style.word_spacing + (rng.uniform(-0.3, 0.3) if style.spacing_jitter else 0.0)
        for ci, ch in enumerate(word):
            if ci:
                cursor += style.spacing + (rng.uniform(-1, 1) * style.spacing_jitter
                                           if style.spacing_jitter else 0.0)
            ink_w, segs = font.glyph(ch)
            box_w = max(ink_w, font.MIN_ADVANCE)
            jit = rng.uniform(-1, 1) * style.glyph_jitter if style.glyph_jitter else 0.0
            off = cursor + (box_w - ink_w) / 2.0 + jit
            segs = segs.copy()
            segs[..., 0] += off
            segs[..., 0] += slant * (font.BASELINE - segs[..., 1])
            # sheared box edges measured at mid x-height
            shear_mid = slant * (font.BASELINE - 6.0)
            glyphs.append((wi, ch, segs, cursor + shear_mid, cursor + box_w + shear_mid))
            cursor += box_w
    allx = np.concatenate([g[2][..., 0].ravel() for g in glyphs])
    lo = min(allx.min(), min(g[3] for g in glyphs)) - thick / 2
    hi = max(allx.max(), max(g[4] for g in glyphs)) + thick / 2
    shift = style.margin - lo
    width = int(np.ceil((hi + shift + style.margin) * u))
    placed = []
    for wi, ch, segs, bl, br in glyphs:
        segs = segs.copy()
        segs[..., 0] += shift
        placed.append((wi, ch, segs * u, (bl + shift) * u, (br + shift) * u))
    return placed, thick * u, max(width, 1)


def _tile(boxes, width):
    """Turn sorted (left, right) extents into spans tiling [0, width)."""
    cuts = [0]
    for (_, r), (l, _) in zip(boxes[:-1], boxes[1:]):
        cuts.append(int(round((r + l) / 2.0)))
    cuts.append(width)
    for i in range(1, len(cuts)):
        cuts[i] = max(cuts[i], cuts[i - 1] + 1)
    cuts[-1] = max(cuts[-1], width)
    return [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]


def _raster(placed, thick, height, width):
    cov = np.zeros((height, width))
    pad = thick + 2
    for _, _, segs, _, _ in placed:
        x0 = max(0, int(np.floor(segs[..., 0].min() - pad)))
        x1 = min(width, int(np.ceil(segs[..., 0].max() + pad)))
        if x1 > x0:
            np.maximum(cov[:, x0:x1], _coverage(segs, thick, (height, x1 - x0), x0),
                       out=cov[:, x0:x1])
    return cov


def _paint(cov, style, rng, bg=None, fg=None):
    bg = rng.uniform(*style.background) if bg is None else bg
    fg = rng.uniform(*style.foreground) if fg is None else fg
    if style.blur:
        cov = ndimage.gaussian_filter(cov, rng.uniform(0.0, style.blur))
    img = bg + (fg - bg) * cov
    if style.noise:
        img = img + rng.normal(0.0, style.noise, img.shape)
    return np.clip(img, 0.0, 1.0)


def _check_text(text):
    if not text:
        raise ValueError("text must be nonempty")
    return check_text(text, ALPHABET)


def render_word_coverage(text, style=Style(), seed=0):
    """Ink coverage plus tiling character spans, before painting."""
    rng = np.random.default_rng(seed)
    _check_text(text)
    placed, thick, width = _layout([text], style, rng)
    cov = _raster(placed, thick, style.height, width)
    spans = _tile([(p[3], p[4]) for p in placed], width)
    return cov, spans, rng


def render_word(text, style=Style(), seed=0):
    """Render ``text`` into a :class:`WordSample` with per-character spans."""
    cov, spans, rng = render_word_coverage(text, style, seed)
    return WordSample(GrayImage(_paint(cov, style, rng)), text, spans, seed)


def render_line(words, style=Style(), seed=0):
    """Render several words on one line; spans are per word."""
    if not words:
        raise ValueError("need at least one word")
    for w in words:
        _check_text(w)
    rng = np.random.default_rng(seed)
    placed, thick, width = _layout(list(words), style, rng)
    cov = _raster(placed, thick, style.height, width)
    ink = []
    for wi in range(len(words)):
        mine = [p for p in placed if p[0] == wi]
        ink.append((min(p[3] for p in mine), max(p[4] for p in mine)))
    spans = _tile(ink, width)
    ink_cols = [(int(np.floor(l)), int(np.ceil(r))) for l, r in ink]
    return LineSample(GrayImage(_paint(cov, style, rng)), list(words), spans, ink_cols, seed)


# ---------------------------------------------------------------- scenes


@dataclass(frozen=True)
class SceneStyle:
    width: int = 320
    height: int = 200
    background: tuple = (0.55, 0.9)
    gradient: float = 0.15  # peak-to-peak intensity of the linear ramp
    noise: float = 0.02
    contrast: float = 0.45  # minimum |text - background|
    dark_text_prob: float = 0.8
    text: Style = field(default_factory=lambda: replace(Style(), noise=0.0))


def _boxes_overlap(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def render_scene(words, params=SceneStyle(), seed=0):
    """Composite words onto a synthetic background.

    ``words`` holds ``(text, (x, y), scale)`` triples: ``(x, y)`` is the
    top-left of the word's em box and ``scale`` its height in pixels. Truth
    boxes are the tight ink boxes ``(x, y, w, h)``.
    """
    rng = np.random.default_rng(seed)
    W, H = params.width, params.height
    yy, xx = np.mgrid[0:H, 0:W]
    base = rng.uniform(*params.background)
    angle = rng.uniform(0, 2 * np.pi)
    ramp = (np.cos(angle) * (xx / W - 0.5) + np.sin(angle) * (yy / H - 0.5)) * params.gradient
    img = base + ramp
    dark = rng.random() < params.dark_text_prob
    if not dark:
        img = 1.0 - img
    rects = []
    truth = []
    for text, (x, y), scale in words:
        _check_text(text)
        st = replace(params.text, height=int(round(scale)))
        cov, _, wrng = render_word_coverage(text, st, int(rng.integers(2 ** 31)))
        if st.blur:
            cov = ndimage.gaussian_filter(cov, wrng.uniform(0.0, st.blur))
        h, w = cov.shape
        rect = (int(x), int(y), w, h)
        if rect[0] < 0 or rect[1] < 0 or rect[0] + w > W or rect[1] + h > H:
            raise ValueError(f"word {text!r} at {rect} does not fit in the {W}x{H} scene")
        for other in rects:
            if _boxes_overlap(rect, other):
                raise ValueError(f"word {text!r} at {rect} overlaps another word")
        rects.append(rect)
        region = img[rect[1]:rect[1] + h, rect[0]:rect[0] + w]
        local = float(region.mean())
        if dark:
            fg = rng.uniform(0.0, max(0.0, local - params.contrast))
        else:
            fg = rng.uniform(min(1.0, local + params.contrast), 1.0)
        img[rect[1]:rect[1] + h, rect[0]:rect[0] + w] = region * (1 - cov) + fg * cov
        rows = np.flatnonzero(cov.max(axis=1) > 0.5)
        cols = np.flatnonzero(cov.max(axis=0) > 0.5)
        box = (rect[0] + int(cols[0]), rect[1] + int(rows[0]),
               int(cols[-1] - cols[0] + 1), int(rows[-1] - rows[0] + 1))
        truth.append((box, text))
    if params.noise:
        img = img + rng.normal(0, params.noise, img.shape)
    return SceneSample(GrayImage(np.clip(img, 0, 1)), truth, seed)


def asdict_style(style):
    return asdict(style)
