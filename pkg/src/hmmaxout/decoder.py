"""Word inference over a cascade graph.

All scores are natural-log costs: an interval/character pair contributes
``log p(c | v) + log p(v)`` and, with a language model, ``log p(c | lm, w)``.
"""
import json
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .alphabet import ALPHABET

NEG = -np.inf


class DecodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmissionTable:
    """Per-interval character log-posteriors ``log_pc`` (V, K) and ``log_pv`` (V,)."""

    log_pc: np.ndarray
    log_pv: np.ndarray
    alphabet: str = ALPHABET

    @classmethod
    def from_probs(cls, pc, pv, alphabet=ALPHABET, floor=1e-12):
        pc = np.asarray(pc, dtype=np.float64)
        pv = np.asarray(pv, dtype=np.float64)
        if pc.ndim != 2 or pc.shape[0] != len(pv) or pc.shape[1] != len(alphabet):
            raise ValueError("emission table shapes do not match the alphabet/interval count")
        return cls(np.log(np.maximum(pc, floor)), np.log(np.maximum(pv, floor)), alphabet)

    @property
    def visual(self):
        """``log cost_v`` for every (interval, character) pair."""
        return self.log_pc + self.log_pv[:, None]


@dataclass(frozen=True)
class Hypothesis:
    text: str
    log_cost: float
    end_interval: int
    path: tuple = ()
    log_visual: float = 0.0

    def sort_key(self):
        return (-self.log_cost, len(self.text), self.text)


@dataclass(frozen=True)
class DecodeResult:
    hypotheses: tuple  # ranked, best first

    @property
    def best(self):
        return self.hypotheses[0]

    def __len__(self):
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    def texts(self):
        return [h.text for h in self.hypotheses]


def _check(g, e):
    if e.log_pc.shape[0] != g.V:
        raise DecodeError("emission table does not match the cascade")


def _traceback(back, k, i, alphabet):
    chars, path = [], []
    while k is not None:
        chars.append(alphabet[i])
        path.append(k)
        k, i = back[k][i]
    return "".join(reversed(chars)), tuple(reversed(path))


def _exact(g, e, lm_log=None, begin_log=None):
    """Viterbi over (interval, character); ``lm_log[j, i] = log p(c_i | c_j)``."""
    _check(g, e)
    V, K = e.log_pc.shape
    vis = e.visual
    S = np.full((V, K), NEG)
    back = [[None] * K for _ in range(V)]
    starts = set(g.starts)
    for k in range(V):
        best = np.full(K, NEG)
        arg = [None] * K
        if k in starts:
            best = np.zeros(K) if begin_log is None else begin_log.copy()
        for q in g.preds[k]:
            if lm_log is None:
                j = int(np.argmax(S[q]))
                cand = np.full(K, S[q, j])
                js = np.full(K, j)
            else:
                M = S[q][:, None] + lm_log
                js = np.argmax(M, axis=0)
                cand = M[js, np.arange(K)]
            better = cand > best
            for i in np.flatnonzero(better):
                arg[i] = (q, int(js[i]))
            best = np.where(better, cand, best)
        S[k] = vis[k] + best
        back[k] = [a if a is not None else (None, None) for a in arg]
    ends = list(g.ends)
    flat = S[ends]
    if not np.isfinite(flat.max()):
        raise DecodeError("no start-to-end path through the cascade")
    r, i = np.unravel_index(int(np.argmax(flat)), flat.shape)
    text, path = _traceback(back, ends[r], int(i), e.alphabet)
    return text, float(flat[r, i]), path


def decode_exact_nolm(g, e):
    """Most likely word without a language model; returns ``(word, log_score, path)``."""
    return _exact(g, e)


def bigram_tables(model, alphabet):
    if model.order != 2:
        raise ValueError("exact bigram decoding needs an order-2 model")
    if model.alphabet != alphabet:
        raise ValueError("language model and emission alphabets differ")
    lm_log = np.stack([model.log_distribution(c) for c in alphabet])
    return lm_log, model.log_distribution("").copy()


def decode_exact_bigram(g, e, model):
    """Most likely word under a bigram model; returns ``(word, log_score, path)``."""
    lm_log, begin = bigram_tables(model, e.alphabet)
    return _exact(g, e, lm_log, begin)


def _select(cands, B):
    """Keep the top ``B`` unique transcripts by (cost desc, length, text)."""
    best = {}
    for h in cands:
        cur = best.get(h.text)
        if cur is None or h.sort_key() < cur.sort_key():
            best[h.text] = h
    return sorted(best.values(), key=Hypothesis.sort_key)[:B]


def cascade_beam_search(g, e, model=None, B=100, normalize_length=False, dump=None):
    """Cascade Beam Search: keep the best ``B`` hypotheses per interval.

    ``model`` is any :class:`~hmmaxout.lm.NGramModel` (or None for no
    language model). ``dump``, if given, is called with
    ``(interval_index, hypotheses)`` once per processed interval.
    """
    if B < 1:
        raise ValueError("beam width must be at least 1")
    _check(g, e)
    if model is not None and model.alphabet != e.alphabet:
        raise ValueError("language model and emission alphabets differ")
    V, K = e.log_pc.shape
    vis = e.visual
    alphabet = e.alphabet
    root = [Hypothesis("", 0.0, -1)]
    Q = [None] * V
    starts = set(g.starts)
    for k in range(V):
        sources = ([root] if k in starts else []) + [Q[q] for q in g.preds[k]]
        hyps = [h for src in sources for h in src]
        if not hyps:
            Q[k] = []
            if dump is not None:
                dump(k, [])
            continue
        base = np.array([h.log_cost for h in hyps])
        if model is None:
            lm = np.zeros((len(hyps), K))
        else:
            lm = np.stack([model.log_distribution(h.text) for h in hyps])
        costs = base[:, None] + vis[k][None, :] + lm
        flat = costs.ravel()
        take = min(flat.size, B * max(1, len(sources)))
        if take < flat.size:
            cut = np.partition(flat, flat.size - take)[flat.size - take]
            idx = np.flatnonzero(flat >= cut)
        else:
            idx = np.arange(flat.size)
        cands = []
        for f in idx:
            hi, c = divmod(int(f), K)
            w = hyps[hi]
            cands.append(Hypothesis(w.text + alphabet[c], float(flat[f]), k, w.path + (k,),
                                    w.log_visual + float(vis[k, c])))
        Q[k] = _select(cands, B)
        if dump is not None:
            dump(k, Q[k])
    final = [h for k in g.ends for h in Q[k]]
    if not final:
        raise DecodeError("no start-to-end path through the cascade")
    if normalize_length:
        final = [Hypothesis(h.text, h.log_cost / len(h.text), h.end_interval, h.path, h.log_visual)
                 for h in final]
    return DecodeResult(tuple(_select(final, len(final))))


def path_score(e, path, text, model=None):
    """Recompute the log cost of ``text`` read along ``path``."""
    total = 0.0
    for n, (k, ch) in enumerate(zip(path, text)):
        c = e.alphabet.index(ch)
        total += e.log_pc[k, c] + e.log_pv[k]
        if model is not None:
            total += model.log_distribution(text[:n])[c]
    return float(total)


def beam_dump_writer(stream, **tag):
    """``dump`` callback writing one JSON line per interval queue (``tag`` fields first)."""
    def write(k, hyps):
        stream.write(json.dumps({**tag, "interval": k, "queue": [
            {"text": h.text, "log_cost": h.log_cost} for h in hyps]}) + "\n")
    return write


# --- word recognition orchestration -------------------------------------

MODES = ("no-lm", "lm", "edit-distance")


class ModelError(RuntimeError):
    """A model file is missing, unreadable or of the wrong kind."""


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ModelBundle:
    """Trained models for word and scene recognition."""

    char: object = None
    correct: object = None
    word_hmm: object = None
    line_hmm: object = None
    detect: object = None

    _roles = {"char": "char", "seg-correct": "correct", "word-hmm": "word_hmm",
              "line-hmm": "line_hmm", "word-detect": "detect"}

    @classmethod
    def load(cls, directory, roles=("char", "seg-correct", "word-hmm")):
        from pathlib import Path

        from .hmm import HybridHmmSegmenter
        from .maxout import MaxoutClassifier
        from .maxout.serialize import ModelFormatError
        from .training import MODEL_FILES

        b = cls()
        for role in roles:
            path = Path(directory) / MODEL_FILES[role]
            if not path.exists():
                raise ModelError(f"missing model file {path}")
            try:
                loader = HybridHmmSegmenter if role.endswith("hmm") else MaxoutClassifier
                setattr(b, cls._roles[role], loader.load(path))
            except (ModelFormatError, StopIteration, KeyError) as err:
                raise ModelError(f"{path}: {err}") from err
        return b

    def save(self, directory):
        from pathlib import Path

        from .training import MODEL_FILES

        Path(directory).mkdir(parents=True, exist_ok=True)
        for role, attr in self._roles.items():
            m = getattr(self, attr)
            if m is not None:
                m.save(Path(directory) / MODEL_FILES[role])


def emission_table(img, g, classifier, case_sensitive=True, side=32):
    from .alphabet import ALPHABET_CI
    from .imaging import slice_patch
    from .lm import collapse_case

    X = np.stack([slice_patch(img, iv.start, iv.end, side) for iv in g.intervals])
    pc = classifier.predict_proba(X)
    pv = np.array([iv.p_correct for iv in g.intervals])
    if case_sensitive:
        return EmissionTable.from_probs(pc, pv, ALPHABET)
    return EmissionTable.from_probs(collapse_case(pc), pv, ALPHABET_CI)


_LM_CACHE = {}


def lexicon_model(lexicon, order, alpha=0.01, lam=0.9):
    """Character n-gram model for a lexicon; cached per (lexicon, order)."""
    from .alphabet import ALPHABET_CI
    from .lm import NGramModel

    key = (lexicon.words, lexicon.case_sensitive, order, alpha, lam)
    if key not in _LM_CACHE:
        if len(_LM_CACHE) > 32:
            _LM_CACHE.clear()
        words = sorted(lexicon.key(w) for w in lexicon.words)
        alphabet = ALPHABET if lexicon.case_sensitive else ALPHABET_CI
        _LM_CACHE[key] = NGramModel(order, alpha, lam, alphabet).fit(words)
    return _LM_CACHE[key]


def recognize_word(img, bundle, mode="edit-distance", B=100, lexicon=None, order=3,
                   case_sensitive=None, normalize_length=False, dump_beam=None,
                   dump_cascade=None):
    """Read one cropped word image; returns ``(word, diagnostics)``.

    ``mode`` is ``no-lm`` (beam search on visual costs), ``lm`` (beam search
    with an ``order``-gram model of ``lexicon``) or ``edit-distance``
    (visual beam search, then lexicon post-processing).
    """
    import time

    from .cascade import build_cascade
    from .lm import lexicon_select

    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "no-lm" and lexicon is None:
        raise ValueError(f"mode {mode} needs a lexicon")
    if case_sensitive is None:
        case_sensitive = True if lexicon is None else lexicon.case_sensitive
    t0 = time.perf_counter()
    stage = "segment"
    try:
        seg = bundle.word_hmm.segment(img)
        stage = "cascade"
        g = build_cascade(img, seg, bundle.correct)
        if dump_cascade is not None:
            dump_cascade(g)
        stage = "emissions"
        e = emission_table(img, g, bundle.char, case_sensitive)
        stage = "decode"
        model = lexicon_model(lexicon, order) if mode == "lm" else None
        res = cascade_beam_search(g, e, model, B, normalize_length, dump_beam)
        word, dist, how = res.best.text, 0, mode
        if mode == "edit-distance":
            stage = "lexicon"
            word, how, dist = lexicon_select(res, lexicon)
    except (StageError, ModelError):
        raise
    except Exception as err:
        raise StageError(stage, err) from err
    best = res.best
    diag = {
        "V": g.V, "B": B, "mode": mode, "select": how, "n_hypotheses": len(res),
        "log_cost": best.log_cost, "cost_v": best.log_visual, "edit_dist": dist,
        "raw": best.text, "latency_ms": 1000.0 * (time.perf_counter() - t0),
    }
    return word, diag


def decode_cascade(img, bundle, case_sensitive=True):
    """Segmentation, cascade and emission table for ``img`` (shared by sweeps)."""
    from .cascade import build_cascade

    seg = bundle.word_hmm.segment(img)
    g = build_cascade(img, seg, bundle.correct)
    return g, emission_table(img, g, bundle.char, case_sensitive)


class WordRecognizer(BaseEstimator):
    """Estimator-style wrapper: ``predict(images, lexicons)`` returns transcripts.

    ``lexicons`` is one :class:`~hmmaxout.lm.Lexicon` shared by every image,
    or a list with one per image (None for the no-lm mode).
    """

    def __init__(self, bundle=None, mode="edit-distance", beam_width=100, order=3,
                 normalize_length=False):
        self.bundle = bundle
        self.mode = mode
        self.beam_width = beam_width
        self.order = order
        self.normalize_length = normalize_length

    def predict(self, images, lexicons=None):
        if self.bundle is None:
            raise ModelError("WordRecognizer needs a model bundle")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {', '.join(MODES)}")
        images = list(images)
        if not isinstance(lexicons, (list, tuple)):
            lexicons = [lexicons] * len(images)
        if len(lexicons) != len(images):
            raise ValueError("need one lexicon per image")
        return [recognize_word(im, self.bundle, self.mode, self.beam_width, lex, self.order,
                               normalize_length=self.normalize_length)[0]
                for im, lex in zip(images, lexicons)]
