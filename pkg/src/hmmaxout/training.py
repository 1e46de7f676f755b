"""Training recipes for every model role, sized for one CPU core."""
from dataclasses import dataclass

from .datasets import (DETECT_SHAPE, char_dataset, correction_dataset, detect_dataset,
                       line_samples, word_samples)
from .hmm import HybridHmmSegmenter
from .maxout import MaxoutClassifier
from .maxout.presets import small_net

ROLES = ("char", "seg-correct", "word-hmm", "line-hmm", "word-detect")

# file name of each role inside a model bundle directory
MODEL_FILES = {
    "char": "char.mxtn",
    "seg-correct": "segcorr.mxtn",
    "word-hmm": "wordhmm.mxtn",
    "line-hmm": "linehmm.mxtn",
    "word-detect": "worddet.mxtn",
}


@dataclass(frozen=True)
class Recipe:
    count: int  # per class for char, samples otherwise
    epochs: int
    learning_rate: float = 0.01
    lr_decay: float = 0.85
    batch_size: int = 64


RECIPES = {
    "char": Recipe(500, 8),
    "seg-correct": Recipe(1500, 10),
    "word-hmm": Recipe(600, 6),
    "line-hmm": Recipe(300, 6),
    "word-detect": Recipe(800, 6, learning_rate=0.003),  # wide dense fan-in diverges at 0.01
}


def train_role(role, count=None, epochs=None, seed=0, callback=None, data=None, **overrides):
    """Generate data (unless ``data`` is given) and fit the model for ``role``."""
    if role not in RECIPES:
        raise ValueError(f"unknown role {role!r}; expected one of {', '.join(ROLES)}")
    r = RECIPES[role]
    count = r.count if count is None else count
    epochs = r.epochs if epochs is None else epochs
    kw = dict(learning_rate=r.learning_rate, lr_decay=r.lr_decay, batch_size=r.batch_size,
              epochs=epochs, seed=seed)
    kw.update(overrides)
    if role in ("word-hmm", "line-hmm"):
        if data is None:
            data = (word_samples(count, seed) if role == "word-hmm"
                    else line_samples(count, seed))
        seg = HybridHmmSegmenter(kind="word" if role == "word-hmm" else "line", **kw)
        return seg.fit(data, callback=callback)
    if data is None:
        if role == "char":
            data = char_dataset(count, seed)
        elif role == "seg-correct":
            data = correction_dataset(word_samples(count, seed), seed)
        else:
            data = detect_dataset(line_samples(count, seed), seed)
    X, y = data
    if role == "char":
        clf = MaxoutClassifier(preset="char", n_classes=62, **kw)
    elif role == "seg-correct":
        clf = MaxoutClassifier(spec=small_net(3), **kw)
    else:
        clf = MaxoutClassifier(spec=small_net(2, (1,) + DETECT_SHAPE), **kw)
    return clf.fit(X, y, callback=callback)
