"""Full-size acceptance properties, one PASS/FAIL line each.

Every criterion runs at its stated size with the suite seed 1; the time
budgets are the stated desk-scale limits.
"""

import subprocess
import sys
import time

import pytest

from graev.suite import CRITERIA, SuiteConfig

BUDGET_S = {
    "01-oracle-equivalence": 60,
    "02-extension-invariance": 10,
    "03-prenorm": 10,
    "04-maximality": 10,
    "05-ball-inclusion": 60,
    "06-wd-refutation": 30,
    "07-completeness": 60,
    "08-incompleteness": 10,
    "09-dichotomy": 30,
}

SUMMARY = {
    "01-oracle-equivalence": lambda r: f"{r['elements']} elements, max_abs_err={r['max_abs_err']}",
    "02-extension-invariance": lambda r: f"{r['triples']} triples, failures={r['extension_failures'] + r['invariance_failures']}",
    "03-prenorm": lambda r: f"{r['pairs']} pairs, failures={r['subadditivity_failures'] + r['witness_failures']}",
    "04-maximality": lambda r: f"{r['representations']} representations, below norm={r['weight_below_norm']}",
    "05-ball-inclusion": lambda r: f"{r['elements_in_ball']} ball elements, failures={r['failures']}",
    "06-wd-refutation": lambda r: f"not refuted={r['not_refuted']}, contradictions={r['contradictions']}",
    "07-completeness": lambda r: f"verdicts={r['verdicts']}",
    "08-incompleteness": lambda r: f"min separation={r['min_ground_separation']:.3g}",
    "09-dichotomy": lambda r: f"rows={r['rows']}, violations={r['violations']}",
}


def report(capsys, name, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.mark.parametrize("name, check", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, check, capsys):
    t0 = time.perf_counter()
    result = check(SuiteConfig(seed=1))
    elapsed = time.perf_counter() - t0
    ok = result["passed"] and elapsed < BUDGET_S[name]
    extra = SUMMARY[name](result)
    report(capsys, name, ok, f"{elapsed:.1f}s (budget {BUDGET_S[name]}s) {extra}")
    assert result["passed"], result
    assert elapsed < BUDGET_S[name]


def test_10_determinism(tmp_path, capsys):
    outs = []
    t0 = time.perf_counter()
    for k in range(2):
        path = tmp_path / f"suite{k}.json"
        proc = subprocess.run([sys.executable, "-m", "graev.cli", "suite", "--seed", "1", "--out", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    elapsed = time.perf_counter() - t0
    ok = outs[0] == outs[1] and elapsed < 600
    report(capsys, "10-determinism", ok, f"two suite runs in {elapsed:.1f}s, {len(outs[0])} bytes each, identical={outs[0] == outs[1]}")
    assert outs[0] == outs[1]
    assert elapsed < 600
