"""End-to-end acceptance criteria, run at the default configuration.

Each criterion runs the matching experiment, checks every report it
produces and its runtime budget, and records a PASS/FAIL line.  The lines
are printed in the terminal summary (see ``conftest.py``), or directly when
this file is run as a script.
"""
import json
import time

import pytest

from alphamod.cli import _block_for, default_config_path
from alphamod.experiments import run_experiment

CONFIG = json.loads(default_config_path().read_text())
SEED = int(CONFIG.get("seed", 0))

# (criterion number, experiment, runtime budget in seconds, short label)
CRITERIA = [
    (1, "index-golden", 1.0, "index calculus golden grid"),
    (2, "partition", 20.0, "partition of unity"),
    (3, "plancherel", 30.0, "Plancherel consistency"),
    (4, "dilation-scaling", 20.0, "dilation scaling"),
    (5, "shell-cardinality", 5.0, "shell cardinality"),
    (6, "comb-equivalence", 120.0, "comb equivalences"),
    (7, "atom-bounds", 180.0, "atom bounds"),
    (8, "sharpness", 120.0, "sharpness probes"),
    (9, "endpoint-divergence", 30.0, "endpoint divergence"),
    (10, "hardy-consistency", 60.0, "local Hardy consistency"),
    (11, "young", 30.0, "Young scaling"),
]

RESULTS = []


def evaluate(number, name, budget, label):
    block = _block_for(name, CONFIG)
    start = time.perf_counter()
    reports = run_experiment(name, block, SEED)
    elapsed = time.perf_counter() - start
    failed = [r.name for r in reports if not r.passed]
    ok = not failed and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d} {label}: {elapsed:.1f}s (budget {budget:g}s)"
    if failed:
        line += "; failing: " + ", ".join(failed)
    return ok, line, reports


@pytest.mark.acceptance
@pytest.mark.parametrize("number,name,budget,label", CRITERIA, ids=[f"c{c[0]:02d}-{c[1]}" for c in CRITERIA])
def test_criterion(number, name, budget, label):
    ok, line, reports = evaluate(number, name, budget, label)
    RESULTS.append(line)
    print(line)
    assert ok, line + "\n" + json.dumps([r.to_dict() for r in reports if not r.passed], indent=1)[:4000]


if __name__ == "__main__":
    for crit in CRITERIA:
        print(evaluate(*crit)[1], flush=True)
