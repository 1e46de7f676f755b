"""Command-line interface: ``hmmaxout {gen,train,recognize,sweep,eval}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 model error.
Every option may also come from a JSON ``--config`` file; explicit flags win
over the file, which wins over the built-in defaults.
"""
import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3
CSV_VERSION = 1

ROLE_DATA = {"char": "chars", "seg-correct": "words", "word-hmm": "words",
             "line-hmm": "lines", "word-detect": "lines"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


DEFAULTS = {
    "gen": {"count": 10, "seed": 0, "distractors": 50},
    "train": {"seed": 0, "data": None, "count": None, "epochs": None, "learning_rate": None,
              "rounds": 1, "log": None},
    "recognize": {"mode": "edit-distance", "beam": 100, "order": 3, "lexicon": None,
                  "case_insensitive": False, "normalize_length": False, "dump_cascade": None,
                  "dump_beam": None, "diagnostics": None, "jobs": 1, "det": 0.5,
                  "max_edit": 2.0, "min_cost_v": -math.inf, "output": None, "seed": 0},
    "sweep": {"grid": None, "mode": None, "beam": 100, "order": 3, "lexicon": None,
              "jobs": 1, "output": None, "limit": None, "max_edit": 2.0,
              "min_cost_v": -math.inf, "seed": 0},
    "eval": {"iou": False, "case_insensitive": False, "output": None, "seed": 0},
}


def build_parser():
    S = argparse.SUPPRESS
    p = _Parser(prog="hmmaxout", description="Hybrid HMM/Maxout text recognition.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(q):
        q.add_argument("--config", default=S, help="JSON file of option defaults")
        q.add_argument("--seed", type=int, default=S, help="seed for all randomness (0)")

    g = sub.add_parser("gen", help="generate synthetic datasets")
    common(g)
    g.add_argument("kind", choices=["chars", "words", "lines", "scenes"])
    g.add_argument("--count", type=int, default=S, help="samples (per class for chars)")
    g.add_argument("--out", required=True)
    g.add_argument("--distractors", type=int, default=S,
                   help="lexicon distractors per word/scene record (50)")

    t = sub.add_parser("train", help="train one model role")
    common(t)
    t.add_argument("role", choices=list(ROLE_DATA))
    t.add_argument("--data", default=S, help="dataset directory (generated if omitted)")
    t.add_argument("--count", type=int, default=S, help="samples to generate without --data")
    t.add_argument("--epochs", type=int, default=S)
    t.add_argument("--learning-rate", type=float, default=S)
    t.add_argument("--rounds", type=int, default=S, help="embedded Viterbi rounds (hmm roles)")
    t.add_argument("--out", required=True, help="model file")
    t.add_argument("--log", default=S, help="training log CSV")

    r = sub.add_parser("recognize", help="read words or scenes")
    common(r)
    r.add_argument("target", choices=["word", "scene"])
    r.add_argument("inputs", nargs="+", help="PGM files or dataset directories")
    r.add_argument("--models", required=True, help="model bundle directory")
    _decode_flags(r)
    r.add_argument("--case-insensitive", action="store_true", default=S)
    r.add_argument("--normalize-length", action="store_true", default=S)
    r.add_argument("--dump-cascade", default=S, help="JSON-lines cascade dump")
    r.add_argument("--dump-beam", default=S, help="JSON-lines beam queue dump")
    r.add_argument("--diagnostics", default=S, help="per-word diagnostics CSV")
    r.add_argument("--det", type=float, default=S, help="word-detection threshold (0.5)")
    r.add_argument("--output", default=S)

    w = sub.add_parser("sweep", help="beam width, LM order or precision/recall sweeps")
    common(w)
    w.add_argument("what", choices=["beam", "lm-order", "pr"])
    w.add_argument("--data", required=True, help="labelled words or scenes directory")
    w.add_argument("--models", required=True)
    w.add_argument("--grid", default=S, help="comma list and a..b ranges")
    _decode_flags(w)
    w.add_argument("--limit", type=int, default=S, help="use the first N items")
    w.add_argument("--output", default=S)

    e = sub.add_parser("eval", help="score predictions against ground truth")
    common(e)
    e.add_argument("--pred", required=True, help="JSON-lines scene or TSV word predictions")
    e.add_argument("--truth", required=True, help="dataset directory")
    e.add_argument("--iou", action="store_true", default=S, help="IoU > 0.5 hit criterion")
    e.add_argument("--case-insensitive", action="store_true", default=S)
    e.add_argument("--output", default=S)
    return p


def _decode_flags(q):
    S = argparse.SUPPRESS
    q.add_argument("--mode", choices=["no-lm", "lm", "edit-distance"], default=S)
    q.add_argument("--beam", type=int, default=S, help="beam width B (100)")
    q.add_argument("--order", type=int, default=S, help="n-gram order for lm mode (3)")
    q.add_argument("--lexicon", default=S, help="lexicon file, one word per line")
    q.add_argument("--max-edit", type=float, default=S, help="edit-distance threshold (2)")
    q.add_argument("--min-cost-v", type=float, default=S, help="visual cost threshold")
    q.add_argument("--jobs", type=int, default=S, help="parallel worker processes")


def resolve(args):
    """Merge defaults, the JSON config file and explicit flags (in rising precedence)."""
    given = vars(args)
    opts = dict(DEFAULTS[args.command])
    if "config" in given:
        try:
            cfg = json.loads(Path(given["config"]).read_text(encoding="utf-8"))
        except OSError as err:
            raise UsageError(f"cannot read config: {err}") from err
        except json.JSONDecodeError as err:
            raise UsageError(f"config is not valid JSON: {err}") from err
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for k, v in cfg.items():
            k = k.replace("-", "_")
            if k not in opts:
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            opts[k] = v
    opts.update({k: v for k, v in given.items() if k != "config"})
    return argparse.Namespace(**opts)


def parse_grid(text, cast=float):
    """``"1,2,4..6"`` -> ``[1, 2, 4, 5, 6]`` (ranges are integer steps)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..", 1)
            out.extend(cast(v) for v in range(int(a), int(b) + 1))
        else:
            out.append(cast(part))
    if not out:
        raise UsageError("empty grid")
    return out


def _csv_writer(stream, schema, header):
    stream.write(f"# hmmaxout {schema} v{CSV_VERSION}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    return w


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")


# ------------------------------------------------------------------ gen

def cmd_gen(o):
    from .datasets import char_dataset, easy_scene, lexicon_for, line_samples, word_samples
    from .dataio import write_dataset

    if o.count < 1:
        raise UsageError("--count must be positive")
    rng = np.random.default_rng(o.seed + 7919)
    if o.kind == "chars":
        from .alphabet import ALPHABET

        X, y = char_dataset(o.count, o.seed)
        items = [(x, {"label": ALPHABET[c]}) for x, c in zip(X, y)]
        extra = {"per_class": o.count}
    elif o.kind == "words":
        items = [(s.image, {**s.to_record(), "lexicon": lexicon_for(s.text, o.distractors, rng)})
                 for s in word_samples(o.count, o.seed)]
        extra = {"distractors": o.distractors}
    elif o.kind == "lines":
        items = [(s.image, s.to_record()) for s in line_samples(o.count, o.seed)]
        extra = {}
    else:
        from .datasets import scene_lexicon

        seeds = np.random.default_rng(o.seed).integers(2 ** 31, size=o.count)
        items = []
        for sd in seeds:
            s = easy_scene(int(sd))
            H, W = s.image.shape
            for (x, y, w, h), _ in s.truth:
                if x < 0 or y < 0 or x + w > W or y + h > H:
                    raise RuntimeError(f"scene {sd}: box outside the image")
            lex = scene_lexicon([t for _, t in s.truth], o.distractors, rng)
            items.append((s.image, {**s.to_record(), "lexicon": lex}))
        extra = {"distractors": o.distractors}
    write_dataset(o.out, o.kind, items, o.seed, extra)
    print(f"wrote {len(items)} {o.kind} to {o.out}")
    return EXIT_OK


# ---------------------------------------------------------------- train

def cmd_train(o):
    from .dataio import load_chars, load_samples, read_manifest
    from .datasets import correction_dataset, detect_dataset
    from .training import train_role

    data = None
    if o.data is not None:
        kind = read_manifest(o.data)["kind"]
        want = ROLE_DATA[o.role]
        if kind != want:
            from .dataio import DataError

            raise DataError(f"role {o.role} needs a {want} dataset, {o.data} holds {kind}")
        if o.role == "char":
            data = load_chars(o.data)
        else:
            samples, _ = load_samples(o.data, want)
            if o.role == "seg-correct":
                data = correction_dataset(samples, o.seed)
            elif o.role == "word-detect":
                data = detect_dataset(samples, o.seed)
            else:
                data = samples
    rows = []
    over = {}
    if o.learning_rate is not None:
        over["learning_rate"] = o.learning_rate
    if o.role.endswith("hmm"):
        over["rounds"] = o.rounds
    model = train_role(o.role, o.count, o.epochs, o.seed, rows.append, data, **over)
    Path(o.out).parent.mkdir(parents=True, exist_ok=True)
    model.save(o.out)
    if o.log:
        with open(o.log, "w", encoding="utf-8", newline="") as f:
            w = _csv_writer(f, "training-log", ["round", "epoch", "loss", "train_acc"])
            for r in rows:
                if "epoch" in r:
                    w.writerow([r.get("round", 1), r["epoch"], f"{r['loss']:.6f}",
                                f"{r['train_acc']:.6f}"])
    print(f"saved {o.role} model to {o.out}")
    return EXIT_OK


# ------------------------------------------------------------ recognize

_BUNDLE = None


def _init_worker(models, roles):
    global _BUNDLE
    from .decoder import ModelBundle

    _BUNDLE = ModelBundle.load(models, roles)


def _run(fn, items, jobs, models, roles):
    if jobs <= 1:
        _init_worker(models, roles)
        return [fn(it) for it in items]
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(models, roles)) as ex:
        return list(ex.map(fn, items))


def _inputs(paths, kind):
    """``(name, image, record)`` for PGM paths and dataset directories, in order."""
    from .dataio import DataError, read_records
    from .imaging import PgmError, read_pgm

    out = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            _, recs = read_records(path, kind)
            out.extend((f"{path.name}/{rec['file']}", img, rec) for img, rec in recs)
        else:
            try:
                out.append((str(path), read_pgm(path.read_bytes()), {}))
            except (OSError, PgmError) as err:
                out.append((str(path), None, {"error": str(err)}))
    if not out:
        raise DataError("no inputs")
    return out


def _lexicon_for(o, rec):
    from .lm import Lexicon

    if o.lexicon_obj is not None:
        return o.lexicon_obj
    if rec.get("lexicon"):
        return Lexicon(frozenset(rec["lexicon"]), not o.case_insensitive)
    return None


def _recognize_word_item(args):
    from .decoder import beam_dump_writer, recognize_word

    o, (name, img, rec) = args
    if img is None:
        return {"name": name, "error": rec["error"]}
    lex = _lexicon_for(o, rec)
    if o.mode != "no-lm" and lex is None:
        return {"name": name, "error": f"mode {o.mode} needs a lexicon"}
    casc, beam = io.StringIO(), io.StringIO()
    dump_c = (lambda g: casc.write(json.dumps({"input": name, "cascade": g.to_json()}) + "\n")) \
        if o.dump_cascade else None
    dump_b = beam_dump_writer(beam, input=name) if o.dump_beam else None
    try:
        word, diag = recognize_word(img, _BUNDLE, o.mode, o.beam, lex, o.order,
                                    not o.case_insensitive, o.normalize_length, dump_b, dump_c)
    except Exception as err:  # reported per input; the run continues
        return {"name": name, "error": str(err)}
    return {"name": name, "word": word, "diag": diag, "cascade": casc.getvalue(),
            "beam": beam.getvalue()}


def _recognize_scene_item(args):
    from .detection import Thresholds, recognize_scene

    o, (name, img, rec) = args
    if img is None:
        return {"name": name, "error": rec["error"]}
    lex = _lexicon_for(o, rec)
    if o.mode != "no-lm" and lex is None:
        return {"name": name, "error": f"mode {o.mode} needs a lexicon"}
    th = Thresholds(o.det, o.min_cost_v, o.max_edit)
    try:
        boxes = recognize_scene(img, _BUNDLE, o.mode, lex, th, o.beam, o.order)
    except Exception as err:
        return {"name": name, "error": str(err)}
    return {"name": name, "boxes": [b.to_record() for b in boxes]}


def _load_lexicon(o):
    from .lm import Lexicon

    o.lexicon_obj = None
    if o.lexicon is not None:
        try:
            o.lexicon_obj = Lexicon.read(o.lexicon, not o.case_insensitive)
        except OSError as err:
            from .dataio import DataError

            raise DataError(f"cannot read lexicon: {err}") from err
        if not len(o.lexicon_obj):
            from .dataio import DataError

            raise DataError(f"{o.lexicon}: lexicon is empty")
    elif o.mode == "lm":
        raise UsageError("--mode lm requires --lexicon PATH")


def cmd_recognize(o):
    if o.beam < 1:
        raise UsageError("--beam must be at least 1")
    _load_lexicon(o)
    scene = o.target == "scene"
    items = _inputs(o.inputs, "scenes" if scene else "words")
    roles = ("char", "seg-correct", "word-hmm") + (("line-hmm", "word-detect") if scene else ())
    fn = _recognize_scene_item if scene else _recognize_word_item
    results = _run(fn, [(o, it) for it in items], o.jobs, o.models, roles)
    failed = 0
    out = _open_out(o.output)
    diag_rows = []
    try:
        for r in results:
            if "error" in r:
                failed += 1
                print(f"error: {r['name']}: {r['error']}", file=sys.stderr)
                continue
            if scene:
                for b in r["boxes"]:
                    out.write(json.dumps({"scene": r["name"], **b}) + "\n")
            else:
                out.write(f"{r['name']}\t{r['word']}\n")
                diag_rows.append((r["name"], r["diag"]))
    finally:
        if out is not sys.stdout:
            out.close()
    if not scene:
        if o.dump_cascade:
            Path(o.dump_cascade).write_text("".join(r.get("cascade", "") for r in results))
        if o.dump_beam:
            Path(o.dump_beam).write_text("".join(r.get("beam", "") for r in results))
        if o.diagnostics:
            with open(o.diagnostics, "w", encoding="utf-8", newline="") as f:
                w = _csv_writer(f, "word-diagnostics",
                                ["input", "V", "B", "mode", "log_cost", "latency_ms"])
                for name, d in diag_rows:
                    w.writerow([name, d["V"], d["B"], d["mode"], f"{d['log_cost']:.6f}",
                                f"{d['latency_ms']:.3f}"])
    return EXIT_DATA if failed else EXIT_OK


# ---------------------------------------------------------------- sweep

def _prepare_word(args):
    from .decoder import decode_cascade

    o, (name, img, rec) = args
    try:
        lex = _lexicon_for(o, rec)
        g, e = decode_cascade(img, _BUNDLE, True if lex is None else lex.case_sensitive)
    except Exception as err:
        return {"name": name, "error": str(err)}
    return {"name": name, "g": g, "e": e, "lex": lex, "truth": rec.get("text")}


def _decode_prepared(p, mode, B, order):
    from .decoder import cascade_beam_search, lexicon_model
    from .lm import lexicon_select

    t0 = time.perf_counter()
    model = lexicon_model(p["lex"], order) if mode == "lm" else None
    res = cascade_beam_search(p["g"], p["e"], model, B)
    word = res.best.text
    if mode == "edit-distance":
        word = lexicon_select(res, p["lex"])[0]
    return word, 1000.0 * (time.perf_counter() - t0)


def _correct(word, truth, lex):
    if lex is not None and not lex.case_sensitive:
        return word.lower() == truth.lower()
    return word == truth


def word_sweep(prepared, what, grid, mode, B=100, order=3):
    """Rows ``(value, accuracy, mean latency ms)`` for a beam-width or LM-order grid."""
    rows = []
    for v in grid:
        hits, lat = 0, []
        for p in prepared:
            b, n = (int(v), order) if what == "beam" else (B, int(v))
            word, ms = _decode_prepared(p, mode, b, n)
            hits += _correct(word, p["truth"], p["lex"])
            lat.append(ms)
        rows.append((v, hits / len(prepared), float(np.mean(lat))))
    return rows


def _scene_candidates_item(args):
    from .detection import scene_candidates

    o, (name, img, rec) = args
    try:
        return {"name": name, "cands": scene_candidates(img, _BUNDLE, o.mode, _lexicon_for(o, rec),
                                                        o.beam, o.order),
                "truth": [(tuple(b), t) for b, t in zip(rec["boxes"], rec["texts"])]}
    except Exception as err:
        return {"name": name, "error": str(err)}


def cmd_sweep(o):
    from .dataio import DataError

    if o.mode is None:
        o.mode = "lm" if o.what == "lm-order" else "edit-distance"
    if o.what == "lm-order" and o.mode != "lm":
        raise UsageError("an lm-order sweep needs --mode lm")
    o.case_insensitive = False
    o.lexicon_obj = None  # per-record lexicons unless --lexicon is given
    if o.lexicon is not None:
        _load_lexicon(o)
    default_grid = {"beam": "1,2,4,8,16,32,64,100", "lm-order": "1..5",
                    "pr": ",".join(f"{x:.2f}" for x in np.linspace(0, 1, 21))}
    grid = parse_grid(o.grid if o.grid is not None else default_grid[o.what],
                      float if o.what == "pr" else int)
    if o.what != "pr" and min(grid) < 1:
        raise UsageError("grid values must be at least 1")
    scene = o.what == "pr"
    items = _inputs([o.data], "scenes" if scene else "words")
    if o.limit:
        items = items[:o.limit]
    roles = ("char", "seg-correct", "word-hmm") + (("line-hmm", "word-detect") if scene else ())
    fn = _scene_candidates_item if scene else _prepare_word
    results = _run(fn, [(o, it) for it in items], o.jobs, o.models, roles)
    bad = [r for r in results if "error" in r]
    for r in bad:
        print(f"error: {r['name']}: {r['error']}", file=sys.stderr)
    good = [r for r in results if "error" not in r]
    if not good:
        raise DataError("no usable inputs")
    out = _open_out(o.output)
    try:
        if scene:
            from .detection import Thresholds, pr_sweep

            pts = pr_sweep([r["cands"] for r in good], [r["truth"] for r in good], grid,
                           Thresholds(0.0, o.min_cost_v, o.max_edit))
            w = _csv_writer(out, "pr-sweep", ["threshold", "precision", "recall", "f", "n_pred"])
            for t, p, r, f, n in pts:
                w.writerow([f"{t:.4f}", f"{p:.6f}", f"{r:.6f}", f"{f:.6f}", n])
        else:
            if any(r["lex"] is None for r in good) and o.mode != "no-lm":
                raise UsageError(f"mode {o.mode} needs --lexicon or per-record lexicons")
            rows = word_sweep(good, o.what, grid, o.mode, o.beam, o.order)
            name = "beam" if o.what == "beam" else "order"
            w = _csv_writer(out, f"{o.what}-sweep", [name, "accuracy", "latency_ms"])
            for v, acc, ms in rows:
                w.writerow([v, f"{acc:.6f}", f"{ms:.4f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_DATA if bad else EXIT_OK


# ----------------------------------------------------------------- eval

def cmd_eval(o):
    from .dataio import DataError, read_records
    from .detection import evaluate_corpus

    _, recs = read_records(o.truth)
    kind = json.loads((Path(o.truth) / "manifest.json").read_text())["kind"]
    try:
        text = Path(o.pred).read_text(encoding="utf-8")
    except OSError as err:
        raise DataError(f"cannot read predictions: {err}") from err
    name = Path(o.truth).name
    out = _open_out(o.output)
    try:
        if kind == "scenes":
            preds = {}
            for n, line in enumerate(text.splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    d = json.loads(line)
                    preds.setdefault(d["scene"], []).append((tuple(d["box"]), d["transcript"]))
                except (json.JSONDecodeError, KeyError, TypeError) as err:
                    raise DataError(f"{o.pred}:{n}: bad prediction ({err})") from err
            P = [preds.get(f"{name}/{rec['file']}", []) for _, rec in recs]
            T = [list(zip(map(tuple, rec["boxes"]), rec["texts"])) for _, rec in recs]
            rep = evaluate_corpus(P, T, o.iou, not o.case_insensitive)
            w = _csv_writer(out, "scene-eval",
                            ["precision", "recall", "f", "hits", "n_pred", "n_truth"])
            w.writerow([f"{rep.precision:.6f}", f"{rep.recall:.6f}", f"{rep.f:.6f}", rep.hits,
                        rep.n_pred, rep.n_truth])
        elif kind == "words":
            preds = {}
            for line in text.splitlines():
                if "\t" in line:
                    k, v = line.split("\t", 1)
                    preds[k] = v
            norm = str.lower if o.case_insensitive else (lambda s: s)
            hits = sum(norm(preds.get(f"{name}/{rec['file']}", "")) == norm(rec["text"])
                       for _, rec in recs)
            w = _csv_writer(out, "word-eval", ["accuracy", "correct", "total"])
            w.writerow([f"{hits / len(recs):.6f}", hits, len(recs)])
        else:
            raise DataError(f"cannot evaluate a {kind} dataset")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "train": cmd_train, "recognize": cmd_recognize,
            "sweep": cmd_sweep, "eval": cmd_eval}


def main(argv=None):
    from .dataio import DataError
    from .decoder import ModelError
    from .imaging import PgmError
    from .maxout.serialize import ModelFormatError

    try:
        o = resolve(build_parser().parse_args(argv))
        return COMMANDS[o.command](o)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, ModelFormatError) as err:
        print(f"model error: {err}", file=sys.stderr)
        return EXIT_MODEL
    except (DataError, PgmError, OSError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
