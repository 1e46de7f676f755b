"""Maxout layers with explicit forward/backward passes.

Max operations (over pieces and over pooling windows) route their gradient
to the lowest index among ties, which is what ``np.argmax`` returns.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def glorot(rng, shape, fan_in, fan_out):
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=shape)


def dense_maxout_forward(x, W, b):
    """``out[i] = max_j x @ W[:, i, j] + b[i, j]`` for a vector or a batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != W.shape[0]:
        raise ValueError(f"input dim {x.shape[-1]} does not match layer dim {W.shape[0]}")
    return np.max(np.tensordot(x, W, axes=([-1], [0])) + b, axis=-1)


def conv_output_size(n, f, pad, pool, pool_stride):
    c = n + 2 * pad - f + 1
    if c < 1:
        raise ValueError("input smaller than filter")
    if c < pool:
        raise ValueError("convolution output smaller than pooling region")
    return c, (c - pool) // pool_stride + 1


class DenseMaxout:
    kind = "dense_maxout"

    def __init__(self, W, b):
        W = np.asarray(W, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if W.ndim != 3 or b.shape != W.shape[1:]:
            raise ValueError("dense maxout expects W (d, m, k) and b (m, k)")
        self.W, self.b = W, b

    @classmethod
    def init(cls, rng, d, units, pieces):
        return cls(glorot(rng, (d, units, pieces), d, units), np.zeros((units, pieces)))

    @property
    def params(self):
        return [self.W, self.b]

    def describe(self):
        d, m, k = self.W.shape
        return {"type": self.kind, "units": m, "pieces": k}

    def forward(self, x):
        if x.shape[1] != self.W.shape[0]:
            raise ValueError(f"input dim {x.shape[1]} does not match layer dim {self.W.shape[0]}")
        z = np.tensordot(x, self.W, axes=([1], [0])) + self.b  # (N, m, k)
        arg = np.argmax(z, axis=2)
        out = np.take_along_axis(z, arg[..., None], axis=2)[..., 0]
        return out, (x, arg)

    def backward(self, dout, cache, need_dx=True):
        x, arg = cache
        N, m = dout.shape
        k = self.W.shape[2]
        dz = np.zeros((N, m, k))
        np.put_along_axis(dz, arg[..., None], dout[..., None], axis=2)
        dW = np.tensordot(x, dz, axes=([0], [0]))
        db = dz.sum(axis=0)
        dx = np.tensordot(dz, self.W, axes=([1, 2], [1, 2])) if need_dx else None
        return dx, [dW, db]


class ConvMaxout:
    """Valid cross-correlation, max over pieces, then max pooling."""

    kind = "conv_maxout"

    def __init__(self, filters, biases, pool=1, pool_stride=1, pad=0):
        filters = np.asarray(filters, dtype=np.float64)
        biases = np.asarray(biases, dtype=np.float64)
        if filters.ndim != 5:
            raise ValueError("filters must have shape (pieces, maps, channels, fh, fw)")
        k, m = filters.shape[:2]
        if biases.shape != (m, k):
            raise ValueError(f"biases must have shape {(m, k)}")
        if pool < 1 or pool_stride < 1:
            raise ValueError("pool size and stride must be positive")
        self.filters, self.biases = filters, biases
        self.pool, self.pool_stride, self.pad = int(pool), int(pool_stride), int(pad)

    @classmethod
    def init(cls, rng, channels, maps, pieces, kernel, pool, pool_stride, pad=0):
        fan_in = channels * kernel * kernel
        fan_out = maps * kernel * kernel / (pool * pool)
        f = glorot(rng, (pieces, maps, channels, kernel, kernel), fan_in, fan_out)
        return cls(f, np.zeros((maps, pieces)), pool, pool_stride, pad)

    @property
    def params(self):
        return [self.filters, self.biases]

    def describe(self):
        k, m, c, fh, fw = self.filters.shape
        return {"type": self.kind, "maps": m, "pieces": k, "kernel": [fh, fw],
                "pool": self.pool, "pool_stride": self.pool_stride, "pad": self.pad}

    def output_shape(self, in_shape):
        c, h, w = in_shape
        k, m, fc, fh, fw = self.filters.shape
        if c != fc:
            raise ValueError(f"layer expects {fc} channels, got {c}")
        _, ph = conv_output_size(h, fh, self.pad, self.pool, self.pool_stride)
        _, pw = conv_output_size(w, fw, self.pad, self.pool, self.pool_stride)
        return (m, ph, pw)

    def forward(self, x):
        k, m, C, fh, fw = self.filters.shape
        if x.ndim != 4 or x.shape[1] != C:
            raise ValueError(f"expected input (N, {C}, H, W), got {x.shape}")
        if self.pad:
            p = self.pad
            x = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
        N, _, H, W = x.shape
        Ho, Wo = H - fh + 1, W - fw + 1
        if Ho < self.pool or Wo < self.pool:
            raise ValueError("input too small for filter and pooling region")
        cols = sliding_window_view(x, (fh, fw), axis=(2, 3))  # N C Ho Wo fh fw
        cols = cols.transpose(0, 2, 3, 1, 4, 5).reshape(N * Ho * Wo, C * fh * fw)
        Wmat = self.filters.reshape(k * m, C * fh * fw).T
        z = (cols @ Wmat).reshape(N, Ho, Wo, k, m) + self.biases.T
        parg = np.argmax(z, axis=3)  # N Ho Wo m
        a = np.take_along_axis(z, parg[:, :, :, None, :], axis=3)[:, :, :, 0, :]
        a = a.transpose(0, 3, 1, 2)  # N m Ho Wo
        p, s = self.pool, self.pool_stride
        Po, Qo = (Ho - p) // s + 1, (Wo - p) // s + 1
        win = sliding_window_view(a, (p, p), axis=(2, 3))[:, :, ::s, ::s][:, :, :Po, :Qo]
        win = win.reshape(N, m, Po, Qo, p * p)
        warg = np.argmax(win, axis=4)
        out = np.take_along_axis(win, warg[..., None], axis=4)[..., 0]
        return out, (cols, parg, warg, (N, H, W, Ho, Wo, Po, Qo))

    def backward(self, dout, cache, need_dx=True):
        cols, parg, warg, (N, H, W, Ho, Wo, Po, Qo) = cache
        k, m, C, fh, fw = self.filters.shape
        p, s = self.pool, self.pool_stride
        # unpool
        r, c = np.divmod(warg, p)
        rows = np.arange(Po)[None, None, :, None] * s + r
        colsi = np.arange(Qo)[None, None, None, :] * s + c
        base = (np.arange(N)[:, None, None, None] * m + np.arange(m)[None, :, None, None]) * (Ho * Wo)
        flat = (base + rows * Wo + colsi).ravel()
        da = np.bincount(flat, weights=dout.ravel(), minlength=N * m * Ho * Wo)
        da = da.reshape(N, m, Ho, Wo).transpose(0, 2, 3, 1)  # N Ho Wo m
        # un-maxout
        dz = np.zeros((N, Ho, Wo, k, m))
        np.put_along_axis(dz, parg[:, :, :, None, :], da[:, :, :, None, :], axis=3)
        dzf = dz.reshape(N * Ho * Wo, k * m)
        dWmat = cols.T @ dzf  # (C fh fw, k m)
        dfilters = dWmat.T.reshape(k, m, C, fh, fw)
        dbiases = dz.sum(axis=(0, 1, 2)).T
        dx = None
        if need_dx:
            Wmat = self.filters.reshape(k * m, C * fh * fw)
            dcols = (dzf @ Wmat).reshape(N, Ho, Wo, C, fh, fw)
            dxp = np.zeros((N, C, H, W))
            for i in range(fh):
                for j in range(fw):
                    dxp[:, :, i:i + Ho, j:j + Wo] += dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
            dx = dxp[:, :, self.pad:H - self.pad, self.pad:W - self.pad] if self.pad else dxp
        return dx, [dfilters, dbiases]


class Softmax:
    """Affine map to ``L`` logits; the loss is applied by :func:`softmax_xent`."""

    kind = "softmax"

    def __init__(self, W, b):
        self.W = np.asarray(W, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)

    @classmethod
    def init(cls, rng, d, classes):
        return cls(glorot(rng, (d, classes), d, classes), np.zeros(classes))

    @property
    def params(self):
        return [self.W, self.b]

    def describe(self):
        return {"type": self.kind, "classes": self.W.shape[1]}

    def forward(self, x):
        if x.shape[1] != self.W.shape[0]:
            raise ValueError(f"input dim {x.shape[1]} does not match layer dim {self.W.shape[0]}")
        return x @ self.W + self.b, x

    def backward(self, dout, x, need_dx=True):
        return (dout @ self.W.T if need_dx else None), [x.T @ dout, dout.sum(axis=0)]


def softmax(logits):
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits, label):
    """Posteriors and ``-log posterior[label]`` (batched when ``logits`` is 2-D)."""
    z = np.asarray(logits, dtype=np.float64)
    shifted = z - z.max(axis=-1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    logp = shifted - logz
    post = np.exp(logp)
    label = np.asarray(label)
    if z.ndim == 1:
        return post, float(-logp[label])
    return post, -logp[np.arange(len(z)), label]


def dropout_apply(x, p, train, rng=None):
    """Inverted dropout: keep with probability ``p`` and scale by ``1/p``."""
    if not 0.0 < p <= 1.0:
        raise ValueError("include probability must lie in (0, 1]")
    x = np.asarray(x, dtype=np.float64)
    if not train or p == 1.0:
        return x, None
    mask = (rng.random(x.shape) < p) / p
    return x * mask, mask
