"""Grayscale rasters, patch normalization, resampling and binary PGM I/O."""
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .._validation import check_pixels

DEFAULT_EPSILON = 1e-8


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable grayscale image with intensities in [0, 1].

    ``pixels`` is stored as a read-only ``(height, width)`` float64 array.
    """

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pixels", check_pixels(self.pixels))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def shape(self):
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"GrayImage(width={self.width}, height={self.height})"

    def crop(self, x0, y0, x1, y1):
        """Crop ``[x0, x1) x [y0, y1)``; coordinates are clipped to the image."""
        x0, x1 = max(0, int(x0)), min(self.width, int(x1))
        y0, y1 = max(0, int(y0)), min(self.height, int(y1))
        if x1 <= x0 or y1 <= y0:
            raise ValueError("empty crop")
        return GrayImage(self.pixels[y0:y1, x0:x1])

    def inverted(self):
        return GrayImage(1.0 - self.pixels)

    def to_uint8(self):
        return np.rint(self.pixels * 255.0).astype(np.uint8)

    @classmethod
    def from_uint8(cls, a):
        return cls(np.asarray(a, dtype=np.float64) / 255.0)


def normalize_patch(p, epsilon=DEFAULT_EPSILON):
    """Subtract the patch mean and divide by (population std + epsilon)."""
    p = np.asarray(p, dtype=np.float64)
    if p.size < 1:
        raise ValueError("patch must have at least one value")
    mu = p.mean()
    sd = p.std()
    return (p - mu) / (sd + epsilon)


def resize(a, shape):
    """Bilinear resample of a 2-D array to ``shape`` (pixel-centre aligned)."""
    a = np.asarray(a, dtype=np.float64)
    h, w = a.shape
    oh, ow = shape
    if (h, w) == (oh, ow):
        return a.copy()
    ys = (np.arange(oh) + 0.5) * (h / oh) - 0.5
    xs = (np.arange(ow) + 0.5) * (w / ow) - 0.5
    yy, xx = np.meshgrid(np.clip(ys, 0, h - 1), np.clip(xs, 0, w - 1), indexing="ij")
    return ndimage.map_coordinates(a, [yy, xx], order=1, mode="nearest")


def fit_to_canvas(a, shape, fill=None):
    """Scale ``a`` uniformly to fit inside ``shape`` and centre it.

    Height is matched first; the result is shrunk further only when it would
    overflow horizontally. The border is filled with ``fill`` (default: the
    median of ``a``, a background estimate).
    """
    a = np.asarray(a, dtype=np.float64)
    oh, ow = shape
    h, w = a.shape
    scale = min(oh / h, ow / w)
    nh = max(1, min(oh, int(round(h * scale))))
    nw = max(1, min(ow, int(round(w * scale))))
    fill = float(np.median(a)) if fill is None else fill
    out = np.full((oh, ow), fill)
    y0 = (oh - nh) // 2
    x0 = (ow - nw) // 2
    out[y0:y0 + nh, x0:x0 + nw] = resize(a, (nh, nw))
    return out


def slice_patch(img, start, end, side=32, epsilon=DEFAULT_EPSILON):
    """Column slice ``[start, end)`` of a word image as a normalized square patch."""
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img)
    start, end = max(0, int(start)), min(pixels.shape[1], int(end))
    if end <= start:
        raise ValueError(f"empty slice [{start}, {end})")
    return normalize_patch(fit_to_canvas(pixels[:, start:end], (side, side)), epsilon)


# --------------------------------------------------------------------- PGM


class PgmError(ValueError):
    """Base class for PGM parse failures; ``offset`` is the failing byte."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class PgmHeaderError(PgmError):
    pass


class PgmTruncatedError(PgmError):
    pass


def write_pgm(img):
    """Encode as binary PGM with maxval 255."""
    header = f"P5 {img.width} {img.height} 255\n".encode("ascii")
    return header + img.to_uint8().tobytes()


def _header_tokens(data, count, pos):
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise PgmHeaderError("header ended early", pos)
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tok = data[start:pos]
        if not tok.isdigit():
            raise PgmHeaderError(f"expected an integer, found {tok[:16]!r}", start)
        tokens.append((int(tok), start))
    return tokens, pos


def read_pgm(data):
    """Decode binary PGM (``P5``, maxval 255) into a :class:`GrayImage`."""
    data = bytes(data)
    if data[:2] != b"P5":
        raise PgmHeaderError("bad magic, expected b'P5'", 0)
    ((w, wpos), (h, hpos), (maxval, mpos)), pos = _header_tokens(data, 3, 2)
    if w < 1:
        raise PgmHeaderError("width must be positive", wpos)
    if h < 1:
        raise PgmHeaderError("height must be positive", hpos)
    if maxval != 255:
        raise PgmHeaderError(f"unsupported maxval {maxval}", mpos)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PgmHeaderError("missing whitespace after maxval", pos)
    pos += 1
    need = w * h
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise PgmTruncatedError(f"payload has {len(payload)} of {need} bytes", pos + len(payload))
    a = np.frombuffer(payload, dtype=np.uint8).reshape(h, w)
    return GrayImage.from_uint8(a)
