"""Hybrid HMM: scaled-likelihood observations, Viterbi decoding and embedded training."""
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_is_fitted
from .imaging import frame_labels, word_frames
from .maxout import MaxoutClassifier, TrainConfig, small_net
from .topology import HmmTopology

FLOOR = 1e-6


class NoPathError(ValueError):
    """No state sequence permitted by the topology explains the frames."""


@dataclass(frozen=True, eq=False)
class TransitionModel:
    initial: np.ndarray
    A: np.ndarray

    def to_json(self):
        return {"initial": self.initial.tolist(), "transitions": self.A.tolist()}

    @classmethod
    def from_json(cls, d):
        return cls(np.array(d["initial"], dtype=float), np.array(d["transitions"], dtype=float))


@dataclass(frozen=True, eq=False)
class StatePrior:
    p: np.ndarray

    def __post_init__(self):
        p = np.maximum(np.asarray(self.p, dtype=np.float64), FLOOR)
        object.__setattr__(self, "p", p / p.sum())


@dataclass(frozen=True, eq=False)
class Alignment:
    states: np.ndarray
    log_score: float = 0.0
    starts: np.ndarray = None  # first column of each frame's stripe
    image_width: int = None


@dataclass(frozen=True)
class Segmentation:
    """Ordered ``(region_class, start, end)`` intervals tiling ``[0, width)``."""

    intervals: tuple
    width: int
    regions: tuple = HmmTopology().regions

    def of_class(self, region=0):
        return [(a, b) for r, a, b in self.intervals if r == region]

    def absorb_gaps(self):
        """Class-0 intervals extended to the midpoints of the flanking class-1 gaps."""
        out = []
        iv = self.intervals
        for i, (r, a, b) in enumerate(iv):
            if r != 0:
                continue
            lo = 0 if i == 0 else (iv[i - 1][1] + iv[i - 1][2]) // 2
            hi = self.width if i == len(iv) - 1 else (iv[i + 1][1] + iv[i + 1][2]) // 2
            out.append((lo, hi))
        return out

    def gaps(self):
        return self.of_class(1)


def scaled_likelihood(posteriors, prior):
    """``p(q|o) / p(q)`` per state (the observation term up to a constant)."""
    prior = prior.p if isinstance(prior, StatePrior) else np.asarray(prior, dtype=np.float64)
    return np.asarray(posteriors, dtype=np.float64) / np.maximum(prior, FLOOR)


def _log(p):
    with np.errstate(divide="ignore"):
        return np.log(p)


def viterbi(log_obs, log_A, log_init, final_mask=None):
    """Best state path for ``log_obs`` of shape (T, S); ties go to the lowest state."""
    log_obs = np.asarray(log_obs, dtype=np.float64)
    T, S = log_obs.shape
    if T < 1:
        raise NoPathError("need at least one frame")
    delta = log_init + log_obs[0]
    back = np.zeros((T, S), dtype=int)
    for t in range(1, T):
        cand = delta[:, None] + log_A
        back[t] = np.argmax(cand, axis=0)
        delta = cand[back[t], np.arange(S)] + log_obs[t]
    if final_mask is not None:
        delta = np.where(final_mask, delta, -np.inf)
    last = int(np.argmax(delta))
    score = float(delta[last])
    if not np.isfinite(score):
        raise NoPathError(f"no permitted state path over {T} frames")
    path = np.empty(T, dtype=int)
    path[-1] = last
    for t in range(T - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return path, score


def _floored_log(trans, topology):
    mask = topology.permitted()
    A = np.where(mask, np.maximum(trans.A, FLOOR), 0.0)
    return _log(A), _log(trans.initial)


def hmm_viterbi(frames, classifier, trans, prior, topology=HmmTopology()):
    """Align a frame sequence: argmax over permitted paths of the scaled-likelihood score."""
    if len(frames) < 1:
        raise NoPathError("need at least one frame")
    post = classifier.predict_proba(frames.frames)
    return viterbi_from_posteriors(post, trans, prior, topology, frames)


def viterbi_from_posteriors(post, trans, prior, topology, frames=None):
    log_obs = _log(np.maximum(scaled_likelihood(post, prior), 1e-300))
    log_A, log_init = _floored_log(trans, topology)
    path, score = viterbi(log_obs, log_A, log_init, topology.final_mask())
    if frames is None:
        return Alignment(path, score)
    return Alignment(path, score, frames.starts, frames.image_width)


def path_to_segmentation(a, topology=HmmTopology()):
    """Runs of frames sharing a region class become column intervals."""
    regions = np.array([topology.region_of(q) for q in a.states])
    starts = a.starts if a.starts is not None else np.arange(len(regions))
    width = a.image_width if a.image_width is not None else len(regions)
    out = []
    begin = 0
    for t in range(1, len(regions) + 1):
        if t == len(regions) or regions[t] != regions[begin]:
            lo = 0 if not out else int(starts[begin])
            hi = width if t == len(regions) else int(starts[t])
            out.append((int(regions[begin]), lo, hi))
            begin = t
    return Segmentation(tuple(out), int(width), topology.regions)


def estimate_from_alignments(alignments, topology=HmmTopology()):
    """Add-one smoothed transition counts over permitted moves and state frequencies."""
    alignments = list(alignments)
    if not alignments:
        raise ValueError("need at least one alignment")
    S = topology.n_states
    mask = topology.permitted()
    counts = np.zeros((S, S))
    freq = np.zeros(S)
    for al in alignments:
        s = np.asarray(al.states if isinstance(al, Alignment) else al, dtype=int)
        np.add.at(counts, (s[:-1], s[1:]), 1.0)
        freq += np.bincount(s, minlength=S)
    if np.any(counts[~mask]):
        raise ValueError("alignment uses a transition the topology forbids")
    A = np.where(mask, counts + 1.0, 0.0)
    A = np.where(mask, np.maximum(A / A.sum(axis=1, keepdims=True), FLOOR), 0.0)
    A /= A.sum(axis=1, keepdims=True)
    prior = StatePrior((freq + 1.0) / (freq.sum() + S))
    return TransitionModel(topology.initial(), A), prior


def embedded_viterbi_train(samples, topology=HmmTopology(), net_spec=None,
                           train_config=TrainConfig(), rounds=1, stride=2, stretch=0.10,
                           classifier=None, callback=None, realign=True):
    """Alternate frame-classifier training, model estimation and forced re-alignment.

    Round 1 starts from the ground-truth labels of :func:`frame_labels`. When
    ``classifier`` is given it is kept frozen instead of being retrained;
    ``realign=False`` keeps the alignments frozen as well.
    Returns ``(classifier, transitions, prior, history)``.
    """
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    seqs = [word_frames(s.image, stride) for s in samples]
    labels = [frame_labels(s, topology, stretch, stride) for s in samples]
    X = np.concatenate([f.frames for f in seqs])
    spec = net_spec or small_net(topology.n_states)
    history = []
    clf = classifier
    for r in range(rounds):
        if classifier is None:
            clf = MaxoutClassifier(spec=spec, n_classes=spec.n_classes,
                                   learning_rate=train_config.learning_rate,
                                   momentum=train_config.momentum,
                                   batch_size=train_config.batch_size,
                                   epochs=train_config.epochs, lr_decay=train_config.lr_decay,
                                   seed=train_config.seed)
            epoch_cb = None
            if callback is not None:
                epoch_cb = lambda row, r=r: callback({"round": r + 1, **row})  # noqa: E731
            clf.fit(X, np.concatenate(labels), callback=epoch_cb)
        trans, prior = estimate_from_alignments(labels, topology)
        post = clf.predict_proba(X)
        total = 0.0
        new = []
        off = 0
        for f in seqs:
            al = viterbi_from_posteriors(post[off:off + len(f)], trans, prior, topology, f)
            off += len(f)
            total += al.log_score
            new.append(al.states)
        row = {"round": r + 1, "log_score": total,
               "changed_frames": int(sum((a != b).sum() for a, b in zip(labels, new)))}
        history.append(row)
        if callback is not None:
            callback(row)
        if realign:
            labels = new
    return clf, trans, prior, history


class HybridHmmSegmenter(BaseEstimator):
    """Segment text images into alternating regions with a hybrid HMM/Maxout model.

    ``kind="word"`` splits words into character/inter-character regions,
    ``kind="line"`` splits lines into word/inter-word regions.
    """

    def __init__(self, kind="word", states_per_region=4, stride=2, stretch=0.10, rounds=1,
                 epochs=6, learning_rate=0.01, momentum=0.9, batch_size=64, lr_decay=0.8,
                 seed=0):
        self.kind = kind
        self.states_per_region = states_per_region
        self.stride = stride
        self.stretch = stretch
        self.rounds = rounds
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.lr_decay = lr_decay
        self.seed = seed

    @property
    def topology(self):
        if self.kind == "line":
            return HmmTopology.line(self.states_per_region)
        return HmmTopology(states_per_region=self.states_per_region)

    def fit(self, samples, y=None, callback=None):
        cfg = TrainConfig(self.learning_rate, self.momentum, self.batch_size, self.epochs,
                          self.lr_decay, self.seed)
        topo = self.topology
        clf, trans, prior, hist = embedded_viterbi_train(
            samples, topo, small_net(topo.n_states), cfg, self.rounds, self.stride,
            self.stretch, callback=callback)
        self.classifier_, self.transitions_, self.prior_, self.history_ = clf, trans, prior, hist
        return self

    def align(self, img):
        check_is_fitted(self, "classifier_")
        frames = word_frames(img, self.stride)
        return hmm_viterbi(frames, self.classifier_, self.transitions_, self.prior_, self.topology)

    def segment(self, img):
        return path_to_segmentation(self.align(img), self.topology)

    def predict(self, images):
        return [self.segment(im) for im in images]

    def _extra(self):
        return {"kind": "hmm", "segmenter": self.kind, "states_per_region": self.states_per_region,
                "stride": self.stride, "stretch": self.stretch,
                "prior": self.prior_.p.tolist(), **self.transitions_.to_json()}

    def save(self, path):
        self.classifier_.save(path, extras=[self._extra()])

    @classmethod
    def load(cls, path):
        clf = MaxoutClassifier.load(path)
        e = next(x for x in clf.extras_ if x.get("kind") == "hmm")
        seg = cls(kind=e["segmenter"], states_per_region=e["states_per_region"],
                  stride=e["stride"], stretch=e["stretch"])
        seg.classifier_ = clf
        seg.transitions_ = TransitionModel.from_json(e)
        seg.prior_ = StatePrior(np.array(e["prior"]))
        seg.history_ = []
        return seg
