"""Dataset directories: PGM images plus a JSON-lines truth file and a manifest."""
import json
from pathlib import Path

import numpy as np

from .imaging import GrayImage, LineSample, SceneSample, WordSample, read_pgm, write_pgm

FORMAT_VERSION = 1
MANIFEST = "manifest.json"
TRUTH = "truth.jsonl"
KINDS = ("chars", "words", "lines", "scenes")


class DataError(ValueError):
    """Malformed or mismatched dataset on disk."""


def _to_unit(a):
    lo, hi = float(a.min()), float(a.max())
    if hi - lo < 1e-12:
        return np.full(a.shape, 0.5)
    return (a - lo) / (hi - lo)


def write_dataset(out_dir, kind, items, seed, extra=None):
    """Write ``items`` as ``NNNNN.pgm`` files plus truth records.

    ``items`` are ``(image, record)`` pairs; character patches may hold any
    real values and are rescaled to [0, 1] before quantisation.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown dataset kind {kind!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    files = []
    for i, (img, rec) in enumerate(items):
        name = f"{i:05d}.pgm"
        if not isinstance(img, GrayImage):
            img = GrayImage(_to_unit(np.asarray(img, dtype=np.float64)))
        (out / name).write_bytes(write_pgm(img))
        lines.append(json.dumps({"file": name, **rec}, sort_keys=True) + "\n")
        files.append(name)
    (out / TRUTH).write_text("".join(lines), encoding="utf-8")
    manifest = {"format": FORMAT_VERSION, "kind": kind, "count": len(files), "seed": seed,
                **(extra or {})}
    (out / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                                encoding="utf-8")
    return files


def read_manifest(path):
    p = Path(path) / MANIFEST
    try:
        m = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError as err:
        raise DataError(f"{p}: no dataset manifest") from err
    except json.JSONDecodeError as err:
        raise DataError(f"{p}: {err}") from err
    if m.get("kind") not in KINDS:
        raise DataError(f"{p}: unknown dataset kind {m.get('kind')!r}")
    return m


def read_records(path, kind=None):
    """Yield ``(image, record)`` pairs of a dataset directory, checking its kind."""
    root = Path(path)
    m = read_manifest(root)
    if kind is not None and m["kind"] != kind:
        raise DataError(f"{root}: expected a {kind} dataset, found {m['kind']}")
    try:
        text = (root / TRUTH).read_text(encoding="utf-8")
    except FileNotFoundError as err:
        raise DataError(f"{root / TRUTH}: missing truth file") from err
    out = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            img = read_pgm((root / rec["file"]).read_bytes())
        except (json.JSONDecodeError, KeyError) as err:
            raise DataError(f"{root / TRUTH}:{n}: bad record ({err})") from err
        except OSError as err:
            raise DataError(f"{root}: {err}") from err
        out.append((img, rec))
    return m, out


def to_sample(kind, img, rec):
    if kind == "words":
        return WordSample(img, rec["text"], [tuple(s) for s in rec["spans"]], rec.get("seed"))
    if kind == "lines":
        return LineSample(img, rec["words"], [tuple(s) for s in rec["spans"]],
                          [tuple(s) for s in rec["ink"]], rec.get("seed"))
    if kind == "scenes":
        return SceneSample(img, [(tuple(b), t) for b, t in zip(rec["boxes"], rec["texts"])],
                           rec.get("seed"))
    raise DataError(f"no sample type for {kind}")


def load_samples(path, kind):
    m, recs = read_records(path, kind)
    return [to_sample(kind, img, rec) for img, rec in recs], [rec for _, rec in recs]


def load_chars(path):
    from .alphabet import INDEX
    from .imaging import normalize_patch

    _, recs = read_records(path, "chars")
    if not recs:
        raise DataError(f"{path}: empty dataset")
    X = np.stack([normalize_patch(img.pixels) for img, _ in recs])
    try:
        y = np.array([INDEX[rec["label"]] for _, rec in recs])
    except KeyError as err:
        raise DataError(f"{path}: bad character label {err}") from err
    return X, y
