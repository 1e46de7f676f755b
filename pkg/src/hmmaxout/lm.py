"""Character n-gram language models, Levenshtein distance and lexicon post-processing."""
from collections import defaultdict
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_is_fitted
from .alphabet import ALPHABET, ALPHABET_CI, INDEX, check_text

BOW = "\x02"  # begin-of-word padding symbol


@dataclass(frozen=True)
class Lexicon:
    words: frozenset
    case_sensitive: bool = True

    def __post_init__(self):
        words = frozenset(self.words)
        if any(not w for w in words):
            raise ValueError("lexicon words must be nonempty")
        object.__setattr__(self, "words", words)

    def key(self, w):
        return w if self.case_sensitive else w.lower()

    def __contains__(self, w):
        if self.case_sensitive:
            return w in self.words
        return w.lower() in {x.lower() for x in self.words}

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(sorted(self.words))

    @classmethod
    def from_text(cls, text, case_sensitive=True):
        """One word per line; blank lines and ``#`` comments are ignored."""
        words = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                words.append(line)
        return cls(frozenset(words), case_sensitive)

    @classmethod
    def read(cls, path, case_sensitive=True):
        with open(path, encoding="utf-8") as f:
            return cls.from_text(f.read(), case_sensitive)


class NGramModel(BaseEstimator):
    """Character n-gram model with add-alpha smoothing and interpolated backoff.

    ``p_n(c|h) = lam * (N(h, c) + alpha) / (N(h) + alpha K) + (1 - lam) * p_{n-1}(c|h')``
    for contexts seen in training; an unseen context backs off entirely to
    ``p_{n-1}``. Words are padded with ``order - 1`` begin markers; the end of
    a word is not modelled.
    """

    def __init__(self, order=2, alpha=0.01, lam=0.9, alphabet=ALPHABET):
        self.order = order
        self.alpha = alpha
        self.lam = lam
        self.alphabet = alphabet

    def fit(self, words, y=None):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        words = list(words.words if isinstance(words, Lexicon) else words)
        if not words:
            raise ValueError("cannot build a language model from an empty lexicon")
        index = {c: i for i, c in enumerate(self.alphabet)}
        K = len(self.alphabet)
        n = self.order
        # counts[m][context] -> vector over the alphabet, for m = 0 .. n-1 context symbols
        counts = [defaultdict(lambda: np.zeros(K)) for _ in range(n)]
        for w in words:
            check_text(w, self.alphabet)
            padded = BOW * (n - 1) + w
            for i in range(n - 1, len(padded)):
                c = index[padded[i]]
                for m in range(n):
                    counts[m][padded[i - m:i]][c] += 1
        self.counts_ = [dict(c) for c in counts]
        self.index_ = index
        self._cache = {}
        return self

    def _dist(self, ctx):
        """Distribution for a context of exactly ``len(ctx)`` (<= order-1) symbols."""
        hit = self._cache.get(ctx)
        if hit is not None:
            return hit
        K = len(self.alphabet)
        m = len(ctx)
        if m == 0:
            c = self.counts_[0].get("", np.zeros(K))
            d = (c + self.alpha) / (c.sum() + self.alpha * K)
        else:
            lower = self._dist(ctx[1:])
            c = self.counts_[m].get(ctx)
            if c is None:
                d = lower
            else:
                d = self.lam * (c + self.alpha) / (c.sum() + self.alpha * K) + (1 - self.lam) * lower
        d.setflags(write=False)
        self._cache[ctx] = d
        return d

    def context(self, w):
        n = self.order
        if n == 1:
            return ""
        return (BOW * (n - 1) + w)[-(n - 1):]

    def distribution(self, w):
        """``p(. | w)`` over the alphabet given the preceding characters ``w``."""
        check_is_fitted(self, "counts_")
        return self._dist(self.context(w))

    def log_distribution(self, w):
        ctx = self.context(w)
        key = ("log", ctx)
        hit = self._cache.get(key)
        if hit is None:
            hit = np.log(self._dist(ctx))
            self._cache[key] = hit
        return hit

    def prob(self, c, w=""):
        check_is_fitted(self, "counts_")
        if c not in self.index_:
            raise ValueError(f"character {c!r} is outside the alphabet")
        return float(self.distribution(w)[self.index_[c]])

    # persistence: plain count tables
    def to_json(self):
        check_is_fitted(self, "counts_")
        return {"kind": "ngram", "order": self.order, "alpha": self.alpha, "lam": self.lam,
                "alphabet": self.alphabet,
                "counts": [{k: v.tolist() for k, v in c.items()} for c in self.counts_]}

    @classmethod
    def from_json(cls, d):
        m = cls(d["order"], d["alpha"], d["lam"], d["alphabet"])
        m.counts_ = [{k: np.array(v) for k, v in c.items()} for c in d["counts"]]
        m.index_ = {c: i for i, c in enumerate(m.alphabet)}
        m._cache = {}
        return m


def build_ngram(lexicon, n, alpha=0.01, lam=0.9, alphabet=ALPHABET):
    return NGramModel(n, alpha, lam, alphabet).fit(lexicon)


def ngram_prob(model, c, w=""):
    return model.prob(c, w)


def edit_distance(a, b):
    """Levenshtein distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def lexicon_select(ranked, lexicon):
    """Pick a lexicon word for a ranked candidate list.

    Returns ``(word, mode, distance)``: the best-ranked candidate found in the
    lexicon (mode ``"in-list"``), otherwise the lexicon word nearest to the
    top candidate by edit distance (mode ``"edit-distance"``), ties broken
    lexicographically.
    """
    words = [getattr(h, "text", h) for h in ranked]
    if not words:
        raise ValueError("ranked list is empty")
    if not len(lexicon):
        raise ValueError("lexicon is empty")
    lex = lexicon if isinstance(lexicon, Lexicon) else Lexicon(frozenset(lexicon))
    keyed = {}
    for w in lex:
        keyed.setdefault(lex.key(w), w)
    for w in words:
        if lex.key(w) in keyed:
            return keyed[lex.key(w)], "in-list", 0
    top = lex.key(words[0])
    best = min(sorted(lex), key=lambda w: (edit_distance(top, lex.key(w)), w))
    return best, "edit-distance", edit_distance(top, lex.key(best))


def collapse_case(posteriors):
    """62-way posteriors to 36-way by summing upper- and lower-case letter mass."""
    p = np.asarray(posteriors, dtype=np.float64)
    if p.shape[-1] != len(ALPHABET):
        raise ValueError(f"expected {len(ALPHABET)} classes, got {p.shape[-1]}")
    out = np.zeros(p.shape[:-1] + (len(ALPHABET_CI),))
    for c, i in INDEX.items():
        out[..., ALPHABET_CI.index(c.lower())] += p[..., i]
    return out
