import json

import pytest

from hmmaxout.cli import EXIT_DATA, EXIT_MODEL, EXIT_OK, EXIT_USAGE, UsageError, main, parse_grid
from hmmaxout.dataio import read_manifest, read_records


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_gen_chars_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["gen", "chars", "--count", "2", "--seed", "7", "--out", str(a)]) == EXIT_OK
    assert main(["gen", "chars", "--count", "2", "--seed", "7", "--out", str(b)]) == EXIT_OK
    assert files(a) == files(b)
    assert len(list(a.glob("*.pgm"))) == 124
    assert read_manifest(a)["seed"] == 7


def test_gen_words(tmp_path):
    assert main(["gen", "words", "--count", "5", "--out", str(tmp_path)]) == EXIT_OK
    _, recs = read_records(tmp_path, "words")
    assert len(recs) == 5 and len(list(tmp_path.glob("*.pgm"))) == 5
    for img, rec in recs:
        assert rec["text"] in rec["lexicon"] and len(rec["lexicon"]) == 51


def test_gen_scenes_boxes_in_bounds(tmp_path):
    assert main(["gen", "scenes", "--count", "3", "--out", str(tmp_path)]) == EXIT_OK
    _, recs = read_records(tmp_path, "scenes")
    assert len(recs) == 3
    for img, rec in recs:
        H, W = img.shape
        for x, y, w, h in rec["boxes"]:
            assert 0 <= x and 0 <= y and x + w <= W and y + h <= H


def test_usage_errors(tmp_path):
    assert main([]) == EXIT_USAGE
    assert main(["gen", "chars", "--out", str(tmp_path), "--count", "0"]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P5\n1 1\n255\n\x00")
    assert main(["recognize", "word", str(p), "--models", str(tmp_path), "--mode", "lm"]) == EXIT_USAGE


def test_missing_models_exit_code(tmp_path):
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P5\n1 1\n255\n\x00")
    assert main(["recognize", "word", str(p), "--models", str(tmp_path / "none"),
                 "--mode", "no-lm"]) == EXIT_MODEL


def test_data_errors(tmp_path):
    assert main(["eval", "--pred", str(tmp_path / "p"), "--truth", str(tmp_path)]) == EXIT_DATA
    main(["gen", "words", "--count", "2", "--out", str(tmp_path / "w")])
    assert main(["train", "char", "--data", str(tmp_path / "w"),
                 "--out", str(tmp_path / "c.mxtn")]) == EXIT_DATA


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"count": 3, "seed": 5}))
    out = tmp_path / "o"
    assert main(["gen", "words", "--config", str(cfg), "--count", "2", "--out", str(out)]) == 0
    m = read_manifest(out)
    assert m["count"] == 2 and m["seed"] == 5
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["gen", "words", "--config", str(cfg), "--out", str(out)]) == EXIT_USAGE


def test_parse_grid():
    assert parse_grid("1,2,4..6", int) == [1, 2, 4, 5, 6]
    assert parse_grid("0.5, 0.25") == [0.5, 0.25]
    with pytest.raises(UsageError):
        parse_grid(" , ")


@pytest.fixture(scope="module")
def tiny(tmp_path_factory):
    """A tiny, quickly trained model bundle plus small word and scene sets."""
    d = tmp_path_factory.mktemp("tiny")
    models = d / "models"
    for role, name in [("char", "char"), ("seg-correct", "segcorr"), ("word-hmm", "wordhmm"),
                       ("line-hmm", "linehmm"), ("word-detect", "worddet")]:
        count = "2" if role == "char" else "6"
        assert main(["train", role, "--count", count, "--epochs", "1",
                     "--out", str(models / f"{name}.mxtn"),
                     "--log", str(d / f"{name}.csv")]) == EXIT_OK
    assert main(["gen", "words", "--count", "3", "--seed", "3", "--out", str(d / "words")]) == 0
    assert main(["gen", "scenes", "--count", "1", "--seed", "3", "--out", str(d / "scenes")]) == 0
    return d


def test_train_log_and_bit_exact(tiny, tmp_path):
    lines = (tiny / "char.csv").read_text().splitlines()
    assert lines[0] == "# hmmaxout training-log v1"
    assert lines[1] == "round,epoch,loss,train_acc"
    args = ["train", "char", "--count", "2", "--epochs", "1", "--out"]
    assert main(args + [str(tmp_path / "again.mxtn")]) == EXIT_OK
    assert (tmp_path / "again.mxtn").read_bytes() == (tiny / "models" / "char.mxtn").read_bytes()


def test_recognize_word_smoke(tiny, tmp_path, capsys):
    out = tmp_path / "pred.tsv"
    rc = main(["recognize", "word", str(tiny / "words"), "--models", str(tiny / "models"),
               "--output", str(out), "--dump-beam", str(tmp_path / "beam.jsonl"),
               "--dump-cascade", str(tmp_path / "casc.jsonl"),
               "--diagnostics", str(tmp_path / "diag.csv")])
    assert rc == EXIT_OK
    rows = [l.split("\t") for l in out.read_text().splitlines()]
    assert len(rows) == 3 and all(len(r) == 2 for r in rows)
    assert len((tmp_path / "casc.jsonl").read_text().splitlines()) == 3
    beam = [json.loads(l) for l in (tmp_path / "beam.jsonl").read_text().splitlines()]
    assert beam and all(set(r) == {"input", "interval", "queue"} for r in beam)
    assert (tmp_path / "diag.csv").read_text().startswith("# hmmaxout word-diagnostics v1\n")
    assert main(["eval", "--pred", str(out), "--truth", str(tiny / "words")]) == EXIT_OK
    assert "accuracy" in capsys.readouterr().out


def test_recognize_word_jobs_keep_order(tiny, tmp_path):
    a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    base = ["recognize", "word", str(tiny / "words"), "--models", str(tiny / "models"), "--output"]
    assert main(base + [str(a)]) == EXIT_OK
    assert main(base + [str(b), "--jobs", "2"]) == EXIT_OK
    assert a.read_text() == b.read_text()


def test_recognize_reports_bad_input(tiny, tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n4 4\n255\n\x00")
    rc = main(["recognize", "word", str(bad), str(tiny / "words"), "--models", str(tiny / "models"),
               "--mode", "no-lm"])
    cap = capsys.readouterr()
    assert rc == EXIT_DATA
    assert "bad.pgm" in cap.err and len(cap.out.splitlines()) == 3


def test_recognize_scene_schema(tiny, tmp_path):
    out = tmp_path / "scene.jsonl"
    rc = main(["recognize", "scene", str(tiny / "scenes"), "--models", str(tiny / "models"),
               "--det", "0", "--max-edit", "99", "--output", str(out)])
    assert rc == EXIT_OK
    for line in out.read_text().splitlines():
        r = json.loads(line)
        assert set(r) == {"scene", "box", "transcript", "cost_v", "edit_dist", "p_text"}
        assert len(r["box"]) == 4
    rep = tmp_path / "rep.csv"
    assert main(["eval", "--pred", str(out), "--truth", str(tiny / "scenes"),
                 "--output", str(rep)]) == EXIT_OK
    lines = rep.read_text().splitlines()
    assert lines[0].startswith("# hmmaxout ") and lines[1].split(",")[:3] == ["precision", "recall", "f"]


def test_sweeps(tiny, tmp_path):
    out = tmp_path / "beam.csv"
    assert main(["sweep", "beam", "--data", str(tiny / "words"), "--models", str(tiny / "models"),
                 "--grid", "1,4", "--output", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[:2] == ["# hmmaxout beam-sweep v1", "beam,accuracy,latency_ms"] and len(lines) == 4
    out = tmp_path / "lm.csv"
    assert main(["sweep", "lm-order", "--data", str(tiny / "words"), "--models",
                 str(tiny / "models"), "--output", str(out)]) == EXIT_OK
    rows = out.read_text().splitlines()[2:]
    assert [r.split(",")[0] for r in rows] == ["1", "2", "3", "4", "5"]
    assert all(0 <= float(r.split(",")[1]) <= 1 for r in rows)
    out = tmp_path / "pr.csv"
    assert main(["sweep", "pr", "--data", str(tiny / "scenes"), "--models", str(tiny / "models"),
                 "--grid", "0,0.5,1", "--output", str(out)]) == EXIT_OK
    assert out.read_text().splitlines()[1] == "threshold,precision,recall,f,n_pred"
    assert main(["sweep", "beam", "--data", str(tiny / "words"), "--models", str(tiny / "models"),
                 "--grid", ","]) == EXIT_USAGE


def test_word_recognizer_estimator(tiny):
    from sklearn.base import clone

    from hmmaxout.decoder import ModelBundle, WordRecognizer

    bundle = ModelBundle.load(tiny / "models")
    _, recs = read_records(tiny / "words", "words")
    images = [img for img, _ in recs]
    rec = WordRecognizer(bundle, mode="no-lm", beam_width=4)
    assert clone(rec).get_params()["beam_width"] == 4
    words = rec.predict(images)
    assert len(words) == 3 and all(isinstance(w, str) and w for w in words)
    with pytest.raises(ValueError):
        WordRecognizer(bundle, mode="bogus").predict(images)
    with pytest.raises(ValueError):
        rec.predict(images, [None])
