"""Built-in stroke font covering the 62 alphanumeric symbols.

Glyphs are polylines in font units with y pointing down: capitals and digits
span y in [1, 8], the x-height band is [4, 8], descenders reach y = 10. The
em box used by the renderer is 11 units tall. Letter pairs that only differ
by case (``o``/``O``, ``s``/``S`` ...) are told apart by size and position in
the em box, so every symbol is visually unique.
"""
import numpy as np

EM_HEIGHT = 11.0
CAP_TOP = 1.0
X_TOP = 4.0
BASELINE = 8.0


def _arc(cx, cy, rx, ry, a0, a1, step=15.0):
    n = max(2, int(abs(a1 - a0) / step) + 1)
    t = np.radians(np.linspace(a0, a1, n))
    return [(cx + rx * np.cos(a), cy + ry * np.sin(a)) for a in t]


def _dot(x, y):
    return [(x, y - 0.1), (x, y + 0.1)]


_BOWL = _arc(1.8, 6, 1.8, 2, 0, 360)

# symbol -> (ink width, strokes)
_GLYPHS = {
    # capitals
    "A": (5.0, [[(0, 8), (2.5, 1), (5, 8)], [(1, 5.3), (4, 5.3)]]),
    "B": (5.0, [[(0, 1), (0, 8)],
                [(0, 1), (3, 1)] + _arc(3, 2.75, 1.5, 1.75, -90, 90) + [(0, 4.5)],
                [(0, 4.5), (3.2, 4.5)] + _arc(3.2, 6.25, 1.8, 1.75, -90, 90) + [(0, 8)]]),
    "C": (5.4, [_arc(2.7, 4.5, 2.7, 3.5, 40, 320)]),
    "D": (5.0, [[(0, 1), (0, 8)], [(0, 1), (2, 1)] + _arc(2, 4.5, 3, 3.5, -90, 90) + [(0, 8)]]),
    "E": (4.5, [[(4.5, 1), (0, 1), (0, 8), (4.5, 8)], [(0, 4.5), (3.5, 4.5)]]),
    "F": (4.5, [[(4.5, 1), (0, 1), (0, 8)], [(0, 4.5), (3.5, 4.5)]]),
    "G": (5.6, [_arc(2.8, 4.5, 2.8, 3.5, 20, 320), [(3.0, 5.2), (5.4, 5.2), (5.4, 7.3)]]),
    "H": (4.5, [[(0, 1), (0, 8)], [(4.5, 1), (4.5, 8)], [(0, 4.5), (4.5, 4.5)]]),
    "I": (3.0, [[(1.5, 1), (1.5, 8)], [(0, 1), (3, 1)], [(0, 8), (3, 8)]]),
    "J": (4.5, [[(2, 1), (4.5, 1)], [(3.5, 1), (3.5, 6.5)] + _arc(2, 6.5, 1.5, 1.5, 0, 180)]),
    "K": (4.7, [[(0, 1), (0, 8)], [(4.5, 1), (0, 5.2)], [(1.6, 3.9), (4.7, 8)]]),
    "L": (4.0, [[(0, 1), (0, 8), (4, 8)]]),
    "M": (5.5, [[(0, 8), (0, 1), (2.75, 5.5), (5.5, 1), (5.5, 8)]]),
    "N": (4.5, [[(0, 8), (0, 1), (4.5, 8), (4.5, 1)]]),
    "O": (5.8, [_arc(2.9, 4.5, 2.9, 3.5, 0, 360)]),
    "P": (4.6, [[(0, 8), (0, 1), (3, 1)] + _arc(3, 2.9, 1.6, 1.9, -90, 90) + [(0, 4.8)]]),
    "Q": (5.8, [_arc(2.9, 4.5, 2.9, 3.5, 0, 360), [(3.5, 6.5), (5.8, 8.4)]]),
    "R": (4.6, [[(0, 8), (0, 1), (3, 1)] + _arc(3, 2.9, 1.6, 1.9, -90, 90) + [(0, 4.8)],
                [(2.3, 4.8), (4.6, 8)]]),
    "S": (4.8, [_arc(2.4, 2.75, 2.2, 1.75, 330, 90) + _arc(2.4, 6.25, 2.2, 1.75, 270, 510)]),
    "T": (5.0, [[(0, 1), (5, 1)], [(2.5, 1), (2.5, 8)]]),
    "U": (4.5, [[(0, 1), (0, 5.8)] + _arc(2.25, 5.8, 2.25, 2.2, 180, 0) + [(4.5, 1)]]),
    "V": (4.0, [[(0, 1), (2.0, 8), (4.0, 1)]]),
    "W": (8.4, [[(0, 1), (2.1, 8), (4.2, 2.5), (6.3, 8), (8.4, 1)]]),
    "X": (5.0, [[(0, 1), (5, 8)], [(5, 1), (0, 8)]]),
    "Y": (5.0, [[(0, 1), (2.5, 4.5), (5, 1)], [(2.5, 4.5), (2.5, 8)]]),
    "Z": (4.8, [[(0, 1), (4.8, 1), (0, 8), (4.8, 8)]]),
    # digits
    "0": (4.4, [_arc(2.2, 4.5, 2.2, 3.5, 0, 360), [(3.6, 2.2), (0.8, 6.8)]]),
    "1": (3.5, [[(0.6, 2.6), (2, 1), (2, 8)], [(0.5, 8), (3.5, 8)]]),
    "2": (4.4, [_arc(2.2, 3.0, 2.1, 2.0, 200, 380) + [(0, 8), (4.4, 8)]]),
    "3": (4.4, [_arc(2.1, 2.75, 2.0, 1.75, 210, 450) + _arc(2.1, 6.25, 2.2, 1.75, 270, 510)]),
    "4": (4.6, [[(3.3, 8), (3.3, 1), (0, 5.8), (4.6, 5.8)]]),
    "5": (4.4, [[(4.2, 1), (0.6, 1), (0.3, 4.3), (2.2, 3.9)] + _arc(2.2, 6, 2.1, 2.1, 270, 510)]),
    "6": (4.4, [_arc(2.3, 6, 2.1, 2.0, 0, 360), [(0.2, 6), (0.6, 3.2), (1.6, 1.5), (3.4, 1)]]),
    "7": (4.5, [[(0, 1), (4.5, 1), (1.5, 8)]]),
    "8": (4.4, [_arc(2.2, 2.75, 1.8, 1.75, 0, 360), _arc(2.2, 6.25, 2.1, 1.75, 0, 360)]),
    "9": (4.3, [_arc(2.1, 3, 2.0, 2.0, 0, 360), [(4.1, 3), (3.8, 6), (2.8, 7.6), (1, 8)]]),
    # lower case
    "a": (3.6, [_BOWL, [(3.6, 4), (3.6, 8)]]),
    "b": (3.6, [[(0, 1), (0, 8)], _BOWL]),
    "c": (3.8, [_arc(1.9, 6, 1.9, 2, 40, 320)]),
    "d": (3.6, [[(3.6, 1), (3.6, 8)], _BOWL]),
    "e": (3.8, [[(0.1, 6), (3.7, 6)] + _arc(1.9, 6, 1.8, 2, 0, -320)]),
    "f": (3.2, [[(1.2, 8), (1.2, 2.5)] + _arc(2.4, 2.5, 1.2, 1.5, 180, 315), [(0, 4), (2.6, 4)]]),
    "g": (3.6, [_BOWL, [(3.6, 4), (3.6, 9)] + _arc(1.9, 9, 1.7, 1.0, 0, 160)]),
    "h": (3.6, [[(0, 1), (0, 8)], _arc(1.8, 5.8, 1.8, 1.8, 180, 360) + [(3.6, 8)]]),
    "i": (1.0, [[(0.5, 4), (0.5, 8)], _dot(0.5, 2.4)]),
    "j": (2.0, [[(1.8, 4), (1.8, 9)] + _arc(0.9, 9, 0.9, 1.0, 0, 150), _dot(1.8, 2.4)]),
    "k": (3.4, [[(0, 1), (0, 8)], [(3.2, 4), (0, 6.3)], [(1.2, 5.5), (3.4, 8)]]),
    "l": (2.3, [[(0.8, 1), (0.8, 7)] + _arc(1.6, 7, 0.8, 1.0, 180, 40)]),
    "m": (5.2, [[(0, 4), (0, 8)], _arc(1.3, 5.6, 1.3, 1.6, 180, 360) + [(2.6, 8)],
                _arc(3.9, 5.6, 1.3, 1.6, 180, 360) + [(5.2, 8)]]),
    "n": (3.6, [[(0, 4), (0, 8)], _arc(1.8, 5.8, 1.8, 1.8, 180, 360) + [(3.6, 8)]]),
    "o": (3.8, [_arc(1.9, 6, 1.9, 2, 0, 360)]),
    "p": (3.6, [[(0, 4), (0, 10)], _BOWL]),
    "q": (4.3, [_BOWL, [(3.6, 4), (3.6, 10), (4.3, 9.6)]]),
    "r": (3.0, [[(0, 4), (0, 8)], _arc(2, 6, 2, 1.8, 180, 300)]),
    "s": (3.2, [_arc(1.6, 5, 1.5, 1, 330, 90) + _arc(1.6, 7, 1.5, 1, 270, 510)]),
    "t": (2.6, [[(1, 2.5), (1, 7.2)] + _arc(1.8, 7.2, 0.8, 0.8, 180, 40), [(0, 4), (2.6, 4)]]),
    "u": (3.6, [[(0, 4), (0, 6.2)] + _arc(1.8, 6.2, 1.8, 1.8, 180, 0), [(3.6, 4), (3.6, 8)]]),
    "v": (3.6, [[(0, 4), (1.8, 8), (3.6, 4)]]),
    "w": (5.2, [[(0, 4), (1.3, 8), (2.6, 5), (3.9, 8), (5.2, 4)]]),
    "x": (3.6, [[(0, 4), (3.6, 8)], [(3.6, 4), (0, 8)]]),
    "y": (3.8, [[(0, 4), (1.9, 8)], [(3.8, 4), (1.9, 8), (1.0, 10)]]),
    "z": (3.4, [[(0, 4), (3.4, 4), (0, 8), (3.4, 8)]]),
}

#: Minimum advance so that very narrow glyphs still occupy a usable column span.
MIN_ADVANCE = 2.2


def glyph(ch):
    """Return ``(ink_width, segments)`` with segments as an ``(n, 2, 2)`` array."""
    try:
        width, strokes = _GLYPHS[ch]
    except KeyError:
        raise ValueError(f"unsupported character {ch!r}") from None
    segs = []
    for stroke in strokes:
        pts = np.asarray(stroke, dtype=np.float64)
        segs.append(np.stack([pts[:-1], pts[1:]], axis=1))
    return width, np.concatenate(segs, axis=0)


def symbols():
    return "".join(sorted(_GLYPHS))
