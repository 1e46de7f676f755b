"""Maximally stable extremal regions.

Dark regions are the connected components of ``{I <= t}`` as ``t`` sweeps
the 256 grey levels; bright regions are the same on the inverted image.
Components at consecutive levels are nested, which gives the component
tree; each level is labelled with :func:`scipy.ndimage.label`
(4-connectivity) and linked to the next by a pixel lookup.
"""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..imaging import GrayImage

DARK = "dark-on-bright"
BRIGHT = "bright-on-dark"


@dataclass(frozen=True)
class Box:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError(f"box must be at least 1x1, got {self.w}x{self.h}")

    @property
    def area(self):
        return self.w * self.h

    @property
    def x1(self):
        return self.x + self.w

    @property
    def y1(self):
        return self.y + self.h

    def as_tuple(self):
        return (self.x, self.y, self.w, self.h)

    def intersection(self, other):
        iw = min(self.x1, other.x1) - max(self.x, other.x)
        ih = min(self.y1, other.y1) - max(self.y, other.y)
        return max(0, iw) * max(0, ih)

    def union_box(self, other):
        x, y = min(self.x, other.x), min(self.y, other.y)
        return Box(x, y, max(self.x1, other.x1) - x, max(self.y1, other.y1) - y)

    @classmethod
    def enclosing(cls, boxes):
        boxes = list(boxes)
        x, y = min(b.x for b in boxes), min(b.y for b in boxes)
        return cls(x, y, max(b.x1 for b in boxes) - x, max(b.y1 for b in boxes) - y)


@dataclass(frozen=True)
class Region:
    runs: tuple  # (row, col_start, col_end_exclusive) runs, row-major
    box: Box
    polarity: str
    variation: float
    level: int

    @property
    def area(self):
        return sum(c1 - c0 for _, c0, c1 in self.runs)

    def mask(self, shape):
        m = np.zeros(shape, dtype=bool)
        for r, c0, c1 in self.runs:
            m[r, c0:c1] = True
        return m

    def pixels(self):
        return frozenset((r, c) for r, c0, c1 in self.runs for c in range(c0, c1))


def _runs(mask, y0, x0):
    out = []
    for r, row in enumerate(mask):
        d = np.diff(np.concatenate(([0], row.astype(np.int8), [0])))
        for c0, c1 in zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1)):
            out.append((y0 + r, x0 + int(c0), x0 + int(c1)))
    return tuple(out)


def _component_tree(u8):
    """Per level: label image, component areas and parent index at the next level."""
    labels, areas, parents = [], [], []
    for t in range(256):
        lab, n = ndimage.label(u8 <= t)
        labels.append(lab)
        areas.append(np.bincount(lab.ravel(), minlength=n + 1).astype(np.int64))
    for t in range(256):
        n = len(areas[t]) - 1
        rep = np.zeros(n + 1, dtype=np.int64)
        flat = labels[t].ravel()
        rep[flat] = np.arange(flat.size)
        if t < 255:
            parents.append(labels[t + 1].ravel()[rep])
        else:
            parents.append(np.ones(n + 1, dtype=np.int64) * (n > 0))
        parents[-1][0] = 0
    return labels, areas, parents


def _largest_children(areas, parents):
    """``child[t][c]``: largest component at level t-1 inside component c at level t (0 = none)."""
    child = [np.zeros(len(areas[0]), dtype=np.int64)]
    for t in range(1, 256):
        n = len(areas[t])
        best = np.zeros(n, dtype=np.int64)
        p = parents[t - 1]
        a = areas[t - 1]
        # visit children in increasing area so the largest (lowest index on ties) wins
        order = np.lexsort((-np.arange(len(a)), a))
        order = order[order > 0]
        best[p[order]] = order
        best[0] = 0
        child.append(best)
    return child


def _one_polarity(u8, polarity, delta, min_area, max_area, max_variation):
    labels, areas, parents = _component_tree(u8)
    child = _largest_children(areas, parents)
    var = []
    for t in range(256):
        n = len(areas[t])
        up = np.arange(n)
        for s in range(t, min(255, t + delta)):
            up = parents[s][up]
        hi = areas[min(255, t + delta)][up]
        down = np.arange(n)
        lo_t = t
        for s in range(t, max(0, t - delta), -1):
            down = child[s][down]
            lo_t = s - 1
        lo = np.where(down > 0, areas[max(lo_t, 0)][down], 0) if t - delta >= 0 else 0
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (hi - lo) / areas[t]
        v[0] = np.inf
        var.append(v)
    out = []
    seen = set()
    for t in range(256):
        n = len(areas[t])
        if n <= 1:
            continue
        a = areas[t]
        v = var[t]
        vp = var[t + 1][parents[t]] if t < 255 else np.full(n, np.inf)
        ch = child[t]
        vc = np.where(ch > 0, var[t - 1][ch], np.inf) if t > 0 else np.full(n, np.inf)
        keep = (v <= max_variation) & (v <= vp) & (v <= vc) & (a >= min_area) & (a <= max_area)
        keep[0] = False
        idx = np.flatnonzero(keep)
        if not len(idx):
            continue
        objs = ndimage.find_objects(labels[t])
        for c in idx:
            sl = objs[c - 1]
            key = (int(a[c]), sl[0].start, sl[1].start, sl[0].stop, sl[1].stop)
            if key in seen:  # nested sets of equal area are equal
                continue
            seen.add(key)
            m = labels[t][sl] == c
            box = Box(sl[1].start, sl[0].start, sl[1].stop - sl[1].start,
                      sl[0].stop - sl[0].start)
            out.append(Region(_runs(m, sl[0].start, sl[1].start), box, polarity,
                              float(v[c]), t))
    return out


def extract_msers(img, delta=5, min_area=15, max_area=0.25, max_variation=0.5,
                  polarities=(DARK, BRIGHT)):
    """Stable regions of both polarities; ``max_area`` is a fraction of the image when < 1."""
    if not isinstance(img, GrayImage):
        img = GrayImage(img)
    u8 = img.to_uint8()
    limit = max_area * u8.size if max_area <= 1 else max_area
    out = []
    for pol in polarities:
        src = u8 if pol == DARK else 255 - u8
        out.extend(_one_polarity(src, pol, delta, min_area, limit, max_variation))
    return out
