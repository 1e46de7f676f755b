"""DBSCAN and the two-pass line clustering of character candidates."""
import numpy as np

from .mser import Box

NOISE = -1


def _pairwise(X, metric):
    if metric == "precomputed":
        D = np.asarray(X, dtype=np.float64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise ValueError("precomputed distances must be a square matrix")
        return D
    if metric is None or metric == "euclidean":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        diff = X[:, None, :] - X[None, :, :]
        return np.sqrt((diff ** 2).sum(-1))
    n = len(X)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = metric(X[i], X[j])
    return D


def dbscan(X, eps, min_pts, metric=None):
    """Density clustering; returns ``(labels, core_mask)`` with ``-1`` for noise.

    A point is core when at least ``min_pts`` points (itself included) lie
    within ``eps``. Points are visited in input order; a border point joins
    the first cluster that reaches it.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be at least 1")
    n = len(X)
    if n == 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=bool)
    D = _pairwise(X, metric)
    nbrs = [np.flatnonzero(row <= eps) for row in D]
    core = np.array([len(nb) >= min_pts for nb in nbrs])
    labels = np.full(n, NOISE)
    cluster = 0
    for i in range(n):
        if labels[i] != NOISE or not core[i]:
            continue
        labels[i] = cluster
        stack = [i]
        while stack:
            p = stack.pop()
            for q in nbrs[p]:
                if labels[q] == NOISE:
                    labels[q] = cluster
                    if core[q]:
                        stack.append(q)
        cluster += 1
    return labels, core


def _row_distance(a, b):
    """One minus the vertical overlap (relative to the shorter box) plus a height-ratio term.

    Overlap rather than centre distance keeps x-height letters, ascenders
    and descenders of one line together.
    """
    ov = max(0, min(a.y1, b.y1) - max(a.y, b.y)) / min(a.h, b.h)
    return (1.0 - ov) + 0.3 * abs(np.log(a.h / b.h))


def _gap_distance(a, b):
    """Horizontal gap between two boxes in units of the larger height."""
    gap = max(0, max(a.x, b.x) - min(a.x1, b.x1))
    return gap / max(a.h, b.h)


def plausible_character(r, image_shape):
    b = r.box
    H, W = image_shape
    if b.h < 8 or b.h > 0.6 * H:
        return False
    aspect = b.w / b.h
    return 0.08 <= aspect <= 2.0


def cluster_lines(regions, row_eps=0.5, gap_eps=1.6, min_pts=2):
    """Group candidate regions into text lines.

    The first pass clusters regions by vertical position and height; the
    second splits every row cluster at large horizontal gaps. Returns
    ``[(line_box, member_regions)]`` sorted top-to-bottom, left-to-right.
    """
    if not regions:
        return []
    out = []
    by_pol = {}
    for r in regions:
        by_pol.setdefault(r.polarity, []).append(r)
    for pol in sorted(by_pol):
        rs = by_pol[pol]
        boxes = [r.box for r in rs]
        lab, _ = dbscan(boxes, row_eps, min_pts, _row_distance)
        for c in sorted(set(lab.tolist()) - {NOISE}):
            members = [rs[i] for i in np.flatnonzero(lab == c)]
            sub, _ = dbscan([m.box for m in members], gap_eps, 1, _gap_distance)
            for s in sorted(set(sub.tolist())):
                group = [members[i] for i in np.flatnonzero(sub == s)]
                if len(group) < min_pts:
                    continue
                out.append((Box.enclosing(g.box for g in group), group))
    uniq = {}
    for box, group in out:
        key = (box, group[0].polarity)
        if key not in uniq or len(group) > len(uniq[key][1]):
            uniq[key] = (box, group)
    return sorted(uniq.values(), key=lambda bg: (bg[0].y, bg[0].x))
