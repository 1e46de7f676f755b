"""Shared fixtures: a trained model bundle cached across test sessions.

Training every role takes roughly a quarter of an hour on one core, so the
bundle is stored under pytest's cache directory, keyed by the training
recipes and the sources that influence training. Delete ``.pytest_cache`` (or
run with ``--cache-clear``) to force a retrain.
"""
import dataclasses
import hashlib
import json
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SEED = 1
TRAINING_SOURCES = ("alphabet.py", "datasets.py", "hmm.py", "topology.py", "training.py",
                    "vocab.py", "imaging", "maxout")


def _bundle_key():
    import hmmaxout
    from hmmaxout.training import RECIPES

    h = hashlib.sha256()
    h.update(json.dumps({k: dataclasses.asdict(r) for k, r in RECIPES.items()},
                        sort_keys=True).encode())
    h.update(str(SEED).encode())
    root = Path(hmmaxout.__file__).parent
    for name in TRAINING_SOURCES:
        p = root / name
        for f in sorted(p.rglob("*.py")) if p.is_dir() else [p]:
            h.update(f.read_bytes())
    return h.hexdigest()[:16]


@pytest.fixture(scope="session")
def bundle_dir(request):
    """Directory holding every trained role plus ``timings.json`` (CPU seconds per role)."""
    from hmmaxout.decoder import ModelBundle
    from hmmaxout.training import MODEL_FILES, ROLES, train_role

    d = Path(request.config.cache.mkdir(f"hmmaxout-models-{_bundle_key()}"))
    tfile = d / "timings.json"
    timings = json.loads(tfile.read_text()) if tfile.exists() else {}
    for role in ROLES:
        if (d / MODEL_FILES[role]).exists() and role in timings:
            continue
        t0 = time.process_time()
        model = train_role(role, seed=SEED)
        timings[role] = time.process_time() - t0
        b = ModelBundle()
        setattr(b, ModelBundle._roles[role], model)
        b.save(d)
        tfile.write_text(json.dumps(timings, indent=1))
    return d


@pytest.fixture(scope="session")
def bundle(bundle_dir):
    from hmmaxout.decoder import ModelBundle
    from hmmaxout.training import ROLES

    return ModelBundle.load(bundle_dir, ROLES)


@pytest.fixture(scope="session")
def timings(bundle_dir):
    return json.loads((bundle_dir / "timings.json").read_text())


ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """``criterion(ok, detail)`` prints and records one pass/fail line, then asserts."""
    name = request.node.name

    def check(ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        ACCEPTANCE.append(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
