"""Architecture presets.

The ``*_full`` presets follow the published layer sizes; the defaults are
scaled down so everything trains on one CPU core.
"""
from .network import NetworkSpec


def _conv(maps, kernel, pieces, pool, pool_stride, dropout=1.0, pad=0):
    return {"type": "conv_maxout", "maps": maps, "kernel": [kernel, kernel], "pieces": pieces,
            "pool": pool, "pool_stride": pool_stride, "pad": pad, "dropout": dropout}


def _dense(units, pieces, dropout):
    return {"type": "dense_maxout", "units": units, "pieces": pieces, "dropout": dropout}


def _softmax(classes, dropout):
    return {"type": "softmax", "classes": classes, "dropout": dropout}


def char_net(n_classes=62, shape=(1, 32, 32)):
    return NetworkSpec(tuple(shape), (
        _conv(8, 8, 2, 4, 2, dropout=0.9),
        _dense(64, 5, 0.8),
        _softmax(n_classes, 0.5),
    ), n_classes)


def char_net_full(n_classes=62, shape=(1, 32, 32)):
    return NetworkSpec(tuple(shape), (
        _conv(48, 8, 2, 4, 2, dropout=0.8, pad=3),
        _conv(128, 8, 2, 4, 2, dropout=0.5, pad=3),
        _conv(128, 5, 2, 2, 2, dropout=0.5, pad=2),
        _dense(400, 5, 0.5),
        _softmax(n_classes, 0.5),
    ), n_classes)


def small_net(n_classes, shape=(1, 32, 32), units=32, maps=8):
    """Desk-scale stand-in for the four-layer segmenter/correction/detection nets."""
    return NetworkSpec(tuple(shape), (
        _conv(maps, 8, 2, 4, 2, dropout=0.9),
        _dense(units, 4, 0.8),
        _softmax(n_classes, 0.5),
    ), n_classes)


def small_net_full(n_classes, shape=(1, 32, 32)):
    return NetworkSpec(tuple(shape), (
        _conv(48, 8, 2, 4, 2, dropout=0.8, pad=3),
        _conv(48, 8, 2, 4, 2, dropout=0.5, pad=3),
        _conv(48, 5, 4, 4, 2, dropout=0.5, pad=2),
        _softmax(n_classes, 0.5),
    ), n_classes)


PRESETS = {
    "char": char_net,
    "char-full": char_net_full,
    "small": small_net,
    "small-full": small_net_full,
}
