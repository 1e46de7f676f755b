"""Sliding-window observation frames and ground-truth frame labels."""
from dataclasses import dataclass

import numpy as np

from ..topology import HmmTopology
from .image import GrayImage, normalize_patch, resize


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """Normalized frames plus the geometry needed to map them back to columns.

    Frame ``i`` represents the column stripe starting at ``starts[i]`` of the
    original image of width ``image_width``.
    """

    frames: np.ndarray  # (n, side, side)
    frame_width: int
    stride: int
    starts: np.ndarray
    image_width: int

    def __len__(self):
        return len(self.frames)


def extract_frames(img, frame_width, stride, side=32):
    """Windows ``[i*stride, i*stride + frame_width)`` rescaled to ``side`` and normalized."""
    a = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    h, w = a.shape
    if frame_width < 1 or stride < 1:
        raise ValueError("frame_width and stride must be positive")
    if w < frame_width:
        raise ValueError(f"image width {w} is narrower than frame width {frame_width}")
    n = (w - frame_width) // stride + 1
    frames = np.empty((n, side, side))
    for i in range(n):
        win = a[:, i * stride:i * stride + frame_width]
        frames[i] = normalize_patch(resize(win, (side, side)))
    return FrameSequence(frames, frame_width, stride, np.arange(n) * stride, w)


def default_stride(height):
    return max(1, height // 8)


def word_frames(img, stride=None, side=32, frame_width=None):
    """Frames centred on every ``stride``-column stripe of ``img``.

    The image is edge-padded so that frame ``i`` is centred on the stripe
    ``[i*stride, (i+1)*stride)``; ``starts`` are reported in unpadded columns.
    """
    a = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    h, w = a.shape
    fw = h if frame_width is None else frame_width
    s = default_stride(h) if stride is None else stride
    n = -(-w // s)
    left = (fw - s) // 2
    right = fw + (n - 1) * s - w - left
    padded = np.pad(a, ((0, 0), (left, max(0, right))), mode="edge")
    seq = extract_frames(padded, fw, s, side)
    return FrameSequence(seq.frames[:n], fw, s, np.arange(n) * s, w)


def _column_regions(sample, stretch):
    """Per-column region class (0 = character/word, 1 = inter) for a sample."""
    width = sample.image.width
    cls = np.zeros(width, dtype=int)
    if hasattr(sample, "char_spans"):
        spans = sample.char_spans
        for (l0, l1), (r0, r1) in zip(spans[:-1], spans[1:]):
            a = int(round(l1 - stretch * (l1 - l0)))
            b = int(round(r0 + stretch * (r1 - r0)))
            cls[max(0, a):min(width, b)] = 1
    else:
        ink = sample.ink_spans
        for (_, l1), (r0, _) in zip(ink[:-1], ink[1:]):
            g = r0 - l1
            a = int(round(l1 - stretch * g))
            b = int(round(r0 + stretch * g))
            cls[max(0, a):min(width, b)] = 1
    return cls


def frame_labels(sample, topology=HmmTopology(), stretch=0.10, stride=None):
    """Ground-truth state label for every frame of ``word_frames(sample.image)``.

    Between adjacent characters, the inter-character region takes the last
    ``stretch`` fraction of the left span and the first ``stretch`` fraction
    of the right span. For a line sample the inter-word region is the ink gap
    widened by ``stretch`` of its own width on both sides. Each region's
    frames are shared evenly among that region's states, left to right.
    """
    if not 0.0 <= stretch < 0.5:
        raise ValueError("stretch must lie in [0, 0.5)")
    width = sample.image.width
    s = default_stride(sample.image.height) if stride is None else stride
    n = -(-width // s)
    cls = _column_regions(sample, stretch)
    # region instances as column runs
    runs = []
    start = 0
    for c in range(1, width + 1):
        if c == width or cls[c] != cls[start]:
            runs.append((int(cls[start]), start, c))
            start = c
    if n < len(runs):
        raise ValueError(f"{n} frames cannot cover {len(runs)} regions")
    centers = np.minimum(np.arange(n) * s + s // 2, width - 1)
    owner = np.searchsorted([r[2] for r in runs], centers, side="right")
    counts = np.bincount(owner, minlength=len(runs))
    for ri in np.flatnonzero(counts == 0):
        _, a, b = runs[ri]
        f = min(n - 1, ((a + b) // 2) // s)
        if counts[owner[f]] < 2:
            raise ValueError("frame sequence too short for the region sequence")
        counts[owner[f]] -= 1
        owner[f] = ri
        counts[ri] = 1
    if np.any(np.diff(owner) < 0):
        raise ValueError("frame sequence too short for the region sequence")
    k = topology.states_per_region
    labels = np.empty(n, dtype=int)
    for ri, (rc, _, _) in enumerate(runs):
        idx = np.flatnonzero(owner == ri)
        m = len(idx)
        pos = np.arange(m) if m < k else (np.arange(m) * k) // m
        labels[idx] = topology.state(rc, 0) + pos
    return labels
