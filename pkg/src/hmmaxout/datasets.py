"""Synthetic training and evaluation sets for every learned component."""
import numpy as np

from .alphabet import ALPHABET, INDEX
from .imaging import (Style, fit_to_canvas, frame_labels, normalize_patch, render_line,
                      render_scene, render_word, slice_patch, word_frames)
from .imaging.render import SceneStyle
from .topology import HmmTopology
from .vocab import WORDS

CORRECT, OVER, UNDER = 0, 1, 2
DETECT_SHAPE = (32, 128)


def styled(word, rng):
    """Random case pattern: lower, Capitalized or UPPER."""
    r = rng.random()
    if r < 0.4:
        return word.lower()
    if r < 0.75:
        return word.capitalize()
    return word.upper()


def sample_words(n, rng, vocab=WORDS, min_len=3, max_len=9, digits=0.05):
    out = []
    pool = [w for w in vocab if min_len <= len(w) <= max_len]
    for _ in range(n):
        if rng.random() < digits:
            k = int(rng.integers(3, 6))
            out.append("".join(rng.choice(list("0123456789"), k)))
        else:
            out.append(styled(pool[int(rng.integers(len(pool)))], rng))
    return out


def _jitter(a, b, width, rng, amount):
    if amount <= 0:
        return a, b
    a2 = int(np.clip(a + rng.integers(-amount, amount + 1), 0, width - 1))
    b2 = int(np.clip(b + rng.integers(-amount, amount + 1), a2 + 1, width))
    return a2, b2


def char_dataset(per_class, seed=0, style=Style(), jitter=2, labels=ALPHABET, side=32):
    """Character patches cut from 3-symbol renderings at random positions."""
    rng = np.random.default_rng(seed)
    X = np.empty((per_class * len(labels), side, side))
    y = np.empty(per_class * len(labels), dtype=int)
    i = 0
    for _ in range(per_class):
        for ch in labels:
            pos = int(rng.integers(3))
            ctx = list(rng.choice(list(ALPHABET), 3))
            ctx[pos] = ch
            ws = render_word("".join(ctx), style, int(rng.integers(2 ** 31)))
            a, b = _jitter(*ws.char_spans[pos], ws.image.width, rng, jitter)
            X[i] = slice_patch(ws.image, a, b, side)
            y[i] = INDEX[ch]
            i += 1
    return X, y


def word_samples(n, seed=0, style=Style(), vocab=WORDS):
    rng = np.random.default_rng(seed)
    texts = sample_words(n, rng, vocab)
    return [render_word(t, style, int(rng.integers(2 ** 31))) for t in texts]


def correction_dataset(samples, seed=0, side=32):
    """Slices labelled correct / over-segmented (a fragment) / under-segmented (glued)."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    for ws in samples:
        spans, w = ws.char_spans, ws.image.width
        for i, (a, b) in enumerate(spans):
            a2, b2 = _jitter(a, b, w, rng, 1)
            X.append(slice_patch(ws.image, a2, b2, side))
            y.append(CORRECT)
            if b - a >= 4:
                frac = rng.uniform(0.3, 0.7)
                m = int(round(a + frac * (b - a)))
                lo, hi = (a, m) if rng.random() < 0.5 else (m, b)
                X.append(slice_patch(ws.image, lo, hi, side))
                y.append(OVER)
            if i + 1 < len(spans):
                j = i + 2 if (i + 2 < len(spans) and rng.random() < 0.2) else i + 1
                X.append(slice_patch(ws.image, a, spans[j][1], side))
                y.append(UNDER)
    return np.array(X), np.array(y)


def frame_dataset(samples, topology=HmmTopology(), stride=2, stretch=0.10):
    X, y = [], []
    for s in samples:
        X.append(word_frames(s.image, stride).frames)
        y.append(frame_labels(s, topology, stretch, stride))
    return np.concatenate(X), np.concatenate(y)


def line_samples(n, seed=0, style=Style(), vocab=WORDS, max_words=4):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(1, max_words + 1))
        words = sample_words(k, rng, vocab)
        out.append(render_line(words, style, int(rng.integers(2 ** 31))))
    return out


def detect_patch(pixels, shape=DETECT_SHAPE):
    return normalize_patch(fit_to_canvas(pixels, shape))


def detect_dataset(lines, seed=0, shape=DETECT_SHAPE):
    """Whole single words (label 1) against fragments, multi-word spans and clutter (0)."""
    rng = np.random.default_rng(seed)
    X, y = [], []
    for ls in lines:
        a = ls.image.pixels
        w = a.shape[1]
        ink = ls.ink_spans
        pad = int(rng.integers(2, 6))
        for l, r in ink:
            X.append(detect_patch(a[:, max(0, l - pad):min(w, r + pad)], shape))
            y.append(1)
            if r - l > 12:
                cut = int(rng.integers(l + 6, r - 5))
                lo, hi = (l, cut) if rng.random() < 0.5 else (cut, r)
                X.append(detect_patch(a[:, max(0, lo - pad):min(w, hi + pad)], shape))
                y.append(0)
        if len(ink) > 1:
            i = int(rng.integers(len(ink) - 1))
            X.append(detect_patch(a[:, max(0, ink[i][0] - pad):min(w, ink[i + 1][1] + pad)],
                                  shape))
            y.append(0)
        # clutter: random textured background crops
        bg = rng.uniform(0.3, 0.9) + rng.normal(0, rng.uniform(0.02, 0.15), (32, int(rng.integers(20, 120))))
        bg = np.clip(bg + _blobs(bg.shape, rng), 0, 1)
        X.append(detect_patch(bg, shape))
        y.append(0)
    return np.array(X), np.array(y)


def _blobs(shape, rng):
    out = np.zeros(shape)
    for _ in range(int(rng.integers(0, 4))):
        cy, cx = rng.uniform(0, shape[0]), rng.uniform(0, shape[1])
        r = rng.uniform(3, 12)
        yy, xx = np.mgrid[0:shape[0], 0:shape[1]]
        out -= rng.uniform(0.2, 0.5) * (((yy - cy) ** 2 + (xx - cx) ** 2) < r * r)
    return out


def lexicon_for(word, n_distractors, rng, vocab=WORDS):
    """Truth word plus distractors drawn from the vocabulary."""
    pool = [v for v in vocab if v.lower() != word.lower()]
    picks = rng.choice(len(pool), size=n_distractors, replace=False)
    return [word] + [styled(pool[i], rng) for i in picks]


def scene_lexicon(texts, n_distractors, rng, vocab=WORDS):
    """Every word in the scene plus distractors, cased like easy-scene words."""
    lower = {t.lower() for t in texts}
    pool = [v for v in vocab if v.lower() not in lower]
    picks = rng.choice(len(pool), size=min(n_distractors, len(pool)), replace=False)
    return list(texts) + [pool[i].capitalize() if rng.random() < 0.65 else pool[i].upper()
                          for i in picks]


def easy_scene(seed, params=SceneStyle(), vocab=WORDS):
    """1-3 lines of 1-3 Capitalized or UPPER words at a common scale per line."""
    rng = np.random.default_rng(seed)
    W, H = params.width, params.height
    layout = []
    y = int(rng.integers(6, 16))
    n_lines = int(rng.integers(1, 4))
    pool = [v for v in vocab if 3 <= len(v) <= 7]
    for _ in range(n_lines):
        scale = int(rng.integers(30, 44))
        if y + scale > H - 4:
            break
        x = int(rng.integers(6, 20))
        for _ in range(int(rng.integers(1, 4))):
            w = pool[int(rng.integers(len(pool)))]
            text = w.upper() if rng.random() < 0.35 else w.capitalize()
            est = int((len(text) * 5.6 + 3.0) * scale / 11.0)
            if x + est > W - 6:
                break
            layout.append((text, (x, y), scale))
            x += est + int(scale * rng.uniform(0.45, 0.8))
        y += scale + int(rng.integers(8, 24))
    # keep only words that fit; the width estimate can be slightly off
    while True:
        try:
            return render_scene(layout, params, seed)
        except ValueError:
            layout = layout[:-1]
