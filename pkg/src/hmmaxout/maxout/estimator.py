"""scikit-learn compatible Maxout classifier."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_is_fitted
from . import serialize
from .network import Network, TrainConfig, train_network
from .presets import PRESETS


class MaxoutClassifier(ClassifierMixin, BaseEstimator):
    """Convolutional Maxout network trained by SGD with momentum and dropout.

    ``X`` is a batch of normalized patches, ``(n, height, width)`` or
    ``(n, channels, height, width)``; ``y`` holds integer labels.

    Parameters
    ----------
    preset : str
        Architecture from :data:`hmmaxout.maxout.presets.PRESETS`, used when
        ``spec`` is None.
    spec : NetworkSpec, optional
        Explicit architecture; overrides ``preset``.
    n_classes : int, optional
        Size of the label space (defaults to ``max(y) + 1``).
    """

    def __init__(self, preset="char", spec=None, n_classes=None, learning_rate=0.01,
                 momentum=0.9, batch_size=64, epochs=10, lr_decay=1.0, max_norm=None, seed=0):
        self.preset = preset
        self.spec = spec
        self.n_classes = n_classes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.lr_decay = lr_decay
        self.max_norm = max_norm
        self.seed = seed

    def _config(self):
        return TrainConfig(self.learning_rate, self.momentum, self.batch_size, self.epochs,
                           self.lr_decay, self.seed, self.max_norm)

    def _make_spec(self, X, y):
        if self.spec is not None:
            return self.spec
        shape = (1,) + X.shape[1:] if X.ndim == 3 else X.shape[1:]
        n = self.n_classes if self.n_classes is not None else int(y.max()) + 1
        return PRESETS[self.preset](n, shape)

    def fit(self, X, y, callback=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=int)
        if X.ndim not in (3, 4) or len(X) != len(y):
            raise ValueError("X must be (n, h, w) or (n, c, h, w) with one label per sample")
        if len(X) == 0:
            raise ValueError("empty training set")
        spec = self._make_spec(X, y)
        cfg = self._config()
        net = Network.build(spec, np.random.default_rng(cfg.seed))
        self.history_ = train_network(net, X, y, cfg, callback)
        self._set_network(net)
        return self

    def _set_network(self, net):
        self.network_ = net
        self.spec_ = net.spec
        self.classes_ = np.arange(net.spec.n_classes)

    def predict_proba(self, X):
        check_is_fitted(self, "network_")
        return self.network_.predict_proba(X)

    def predict_log_proba(self, X):
        return np.log(np.maximum(self.predict_proba(X), 1e-300))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    # persistence --------------------------------------------------------
    def to_bytes(self, extras=()):
        check_is_fitted(self, "network_")
        return serialize.dumps(self.network_, extras)

    def save(self, path, extras=()):
        with open(path, "wb") as f:
            f.write(self.to_bytes(extras))

    @classmethod
    def from_bytes(cls, data):
        net, extras = serialize.loads(data)
        clf = cls(spec=net.spec, n_classes=net.spec.n_classes)
        clf._set_network(net)
        clf.extras_ = extras
        return clf

    @classmethod
    def load(cls, path):
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())

    @classmethod
    def untrained(cls, spec, seed=0, zero_output=False):
        """An initialized but untrained classifier (``zero_output`` zeroes the softmax)."""
        net = Network.build(spec, np.random.default_rng(seed))
        if zero_output:
            for p in net.layers[-1].params:
                p[...] = 0.0
        clf = cls(spec=spec, n_classes=spec.n_classes, seed=seed)
        clf._set_network(net)
        return clf


def train_classifier(X, y, spec, config=TrainConfig(), callback=None):
    """Train a classifier for ``spec``; deterministic given ``config.seed``."""
    clf = MaxoutClassifier(spec=spec, n_classes=spec.n_classes,
                           learning_rate=config.learning_rate, momentum=config.momentum,
                           batch_size=config.batch_size, epochs=config.epochs,
                           lr_decay=config.lr_decay, max_norm=config.max_norm,
                           seed=config.seed)
    return clf.fit(X, y, callback)


def predict_posteriors(clf, patch):
    """Posterior over the label space for one patch (eval mode)."""
    patch = np.asarray(patch, dtype=np.float64)
    return clf.predict_proba(patch[None])[0]
