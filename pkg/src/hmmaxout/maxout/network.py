"""Network specification, forward/backward passes and the SGD trainer."""
import logging
from dataclasses import dataclass

import numpy as np

from .layers import ConvMaxout, DenseMaxout, Softmax, dropout_apply, softmax_xent

log = logging.getLogger(__name__)


class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch):
        super().__init__(f"training diverged (non-finite loss) in epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class NetworkSpec:
    """Ordered layer descriptions ending in a softmax.

    Each layer dict carries ``dropout``: the inclusion probability applied to
    that layer's input during training.
    """

    input_shape: tuple  # (channels, height, width)
    layers: tuple
    n_classes: int

    def __post_init__(self):
        object.__setattr__(self, "input_shape", tuple(int(v) for v in self.input_shape))
        object.__setattr__(self, "layers", tuple(dict(l) for l in self.layers))
        if not self.layers or self.layers[-1]["type"] != "softmax":
            raise ValueError("network must end in a softmax layer")
        if self.layers[-1]["classes"] != self.n_classes:
            raise ValueError("softmax size does not match n_classes")
        for l in self.layers:
            p = l.get("dropout", 1.0)
            if not 0.0 < p <= 1.0:
                raise ValueError("dropout inclusion probabilities must lie in (0, 1]")

    def to_json(self):
        return {"input_shape": list(self.input_shape), "layers": [dict(l) for l in self.layers],
                "n_classes": self.n_classes}

    @classmethod
    def from_json(cls, d):
        layers = []
        for l in d["layers"]:
            l = dict(l)
            if "kernel" in l:
                l["kernel"] = list(l["kernel"])
            layers.append(l)
        return cls(tuple(d["input_shape"]), tuple(layers), int(d["n_classes"]))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    momentum: float = 0.9
    batch_size: int = 64
    epochs: int = 10
    lr_decay: float = 1.0  # multiplicative, per epoch
    seed: int = 0
    max_norm: float = None  # cap on the L2 norm of each unit's incoming weights

    def __post_init__(self):
        if not 0.0 < self.learning_rate or not 0.0 <= self.momentum < 1.0:
            raise ValueError("need learning_rate > 0 and momentum in [0, 1)")
        if self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch_size must be positive and epochs non-negative")


class Network:
    def __init__(self, spec, layers):
        self.spec = spec
        self.layers = layers
        self.keep = [l.get("dropout", 1.0) for l in spec.layers]

    @classmethod
    def build(cls, spec, rng):
        shape = spec.input_shape
        layers = []
        for desc in spec.layers:
            t = desc["type"]
            if t == "conv_maxout":
                kern = desc["kernel"]
                kern = kern[0] if isinstance(kern, (list, tuple)) else kern
                layer = ConvMaxout.init(rng, shape[0], desc["maps"], desc["pieces"], kern,
                                        desc.get("pool", 1), desc.get("pool_stride", 1),
                                        desc.get("pad", 0))
                shape = layer.output_shape(shape)
            elif t == "dense_maxout":
                d = int(np.prod(shape))
                layer = DenseMaxout.init(rng, d, desc["units"], desc["pieces"])
                shape = (desc["units"],)
            elif t == "softmax":
                layer = Softmax.init(rng, int(np.prod(shape)), desc["classes"])
                shape = (desc["classes"],)
            else:
                raise ValueError(f"unknown layer type {t!r}")
            layers.append(layer)
        return cls(spec, layers)

    @property
    def params(self):
        return [p for l in self.layers for p in l.params]

    def _prep(self, x):
        x = np.asarray(x, dtype=np.float64)
        C, H, W = self.spec.input_shape
        if x.ndim == 3 and C == 1:
            x = x[:, None]
        if x.shape[1:] != (C, H, W):
            raise ValueError(f"expected inputs of shape {(C, H, W)}, got {x.shape[1:]}")
        return x

    def forward(self, x, train=False, rng=None, masks=None):
        """Logits for a batch; returns ``(logits, caches, masks)``."""
        h = self._prep(x)
        caches, used = [], []
        for i, layer in enumerate(self.layers):
            if layer.kind != "conv_maxout" and h.ndim > 2:
                caches.append(("flatten", h.shape))
                h = h.reshape(len(h), -1)
            else:
                caches.append(None)
            if masks is not None:
                m = masks[i]
                if m is not None:
                    h = h * m
            elif train:
                h, m = dropout_apply(h, self.keep[i], True, rng)
            else:
                m = None
            used.append(m)
            h, cache = layer.forward(h)
            caches.append(cache)
        return h, caches, used

    def loss_and_grads(self, x, y, rng=None, masks=None, train=True):
        """Mean cross-entropy and its gradient for each param in ``self.params`` order."""
        logits, caches, used = self.forward(x, train=train, rng=rng, masks=masks)
        post, losses = softmax_xent(logits, y)
        N = len(logits)
        d = post.copy()
        d[np.arange(N), y] -= 1.0
        d /= N
        grads = [None] * len(self.layers)
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            cache = caches[2 * i + 1]
            d, g = layer.backward(d, cache, need_dx=i > 0)
            grads[i] = g
            if i > 0:
                if used[i] is not None:
                    d = d * used[i]
                flat = caches[2 * i]
                if flat is not None:
                    d = d.reshape(flat[1])
        return float(losses.mean()), [g for gs in grads for g in gs], post

    def predict_proba(self, x, batch_size=256):
        x = self._prep(x)
        out = []
        for i in range(0, len(x), batch_size):
            logits, _, _ = self.forward(x[i:i + batch_size])
            out.append(softmax_xent(logits, np.zeros(len(logits), dtype=int))[0])
        return np.concatenate(out) if out else np.zeros((0, self.spec.n_classes))


def sgd_momentum_step(params, grads, velocity, learning_rate, momentum):
    """In place ``v <- mu v - lr g; theta <- theta + v``; returns ``(params, velocity)``."""
    for p, g, v in zip(params, grads, velocity):
        if p.shape != g.shape or p.shape != v.shape:
            raise ValueError("parameter, gradient and velocity shapes differ")
        v *= momentum
        v -= learning_rate * g
        p += v
    return params, velocity


def apply_max_norm(net, limit):
    """Rescale any unit whose incoming weight vector is longer than ``limit``."""
    for layer in net.layers:
        if layer.kind == "conv_maxout":
            W, axes = layer.filters, (2, 3, 4)
        elif layer.kind == "dense_maxout":
            W, axes = layer.W, (0,)
        else:
            W, axes = layer.W, (0,)
        norms = np.sqrt((W ** 2).sum(axis=axes, keepdims=True))
        W *= np.minimum(1.0, limit / np.maximum(norms, 1e-12))


def train_network(net, X, y, config, callback=None):
    """Minibatch SGD with momentum and dropout; returns per-epoch history."""
    rng = np.random.default_rng(config.seed)
    X = net._prep(X)
    y = np.asarray(y, dtype=int)
    if len(X) == 0:
        raise ValueError("empty training set")
    if y.min() < 0 or y.max() >= net.spec.n_classes:
        raise ValueError("labels outside the network's label space")
    params = net.params
    velocity = [np.zeros_like(p) for p in params]
    lr = config.learning_rate
    history = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(X))
        total, correct = 0.0, 0
        for i in range(0, len(X), config.batch_size):
            idx = order[i:i + config.batch_size]
            with np.errstate(over="ignore", invalid="ignore"):
                loss, grads, post = net.loss_and_grads(X[idx], y[idx], rng=rng)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            sgd_momentum_step(params, grads, velocity, lr, config.momentum)
            if config.max_norm:
                apply_max_norm(net, config.max_norm)
            total += loss * len(idx)
            correct += int((post.argmax(axis=1) == y[idx]).sum())
        row = {"epoch": epoch, "loss": total / len(X), "mean_log_likelihood": -total / len(X),
               "train_acc": correct / len(X), "learning_rate": lr}
        history.append(row)
        log.info("epoch %d loss %.4f acc %.4f", epoch, row["loss"], row["train_acc"])
        if callback is not None:
            callback(row)
        lr *= config.lr_decay
    return history
