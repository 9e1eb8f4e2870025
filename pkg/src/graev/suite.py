"""Property suite behind ``graev suite`` and ``tests/test_acceptance.py``.

Each ``check_*`` function draws its own Philox stream from the suite seed and
returns a JSON-ready dict with a ``passed`` flag. Nothing time-dependent goes
into the output, so equal seeds give byte-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .boolean_group import ZERO, GroupElement, Representation
from .completeness_lab import (
    CONVERGED, ESCAPED, NO_LIMIT, SEPARATION_FACTOR, analyze_cauchy, generate_sequence, ground_separation,
)
from .graev_metric import (
    check_matching, graev_dist, graev_norm, oracle_budget, oracle_layers, reduce_representation,
)
from .ground_space import GroundSpace, PseudometricSequence, combine_sup, metric_closure
from .neighborhood import check_witness, certify_reduced, refute_bounded, wd_membership, wd_witness_from_ball
from .rng import GENERATOR_NAME, stream


@dataclass
class SuiteConfig:
    seed: int = 1
    quick: bool = False
    tol: float = 1e-9
    lab_tol: float = 1e-6

    def count(self, full: int) -> int:
        return max(1, full // 10) if self.quick else full


def random_pseudometric(rng, n: int, zero_prob: float = 0.15) -> GroundSpace:
    """Random symmetric table with entries in {0, 1/4, ..., 4}, repaired by shortest-path closure.

    Quarter-integer entries keep every sum exact in binary floating point.
    """
    a = rng.integers(1, 17, size=(n, n)) / 4.0
    a[rng.random((n, n)) < zero_prob] = 0.0
    a = np.triu(a, 1)
    return GroundSpace.from_matrix(metric_closure(a + a.T))


def corpus(seed: int, count: int, max_points: int = 7) -> list[GroundSpace]:
    rng = stream(seed, "corpus")
    return [random_pseudometric(rng, int(rng.integers(2, max_points + 1))) for _ in range(count)]


def random_element(rng, s: GroundSpace) -> GroupElement:
    bits = rng.random(s.size - 1) < 0.5
    return GroupElement(tuple(int(i) + 1 for i in np.flatnonzero(bits)))


def all_elements(s: GroundSpace):
    for mask in range(0, 1 << s.size, 2):
        yield GroupElement.from_mask(mask)


# ---------------------------------------------------------------------------


def check_oracle_equivalence(cfg: SuiteConfig) -> dict:
    spaces = corpus(cfg.seed, cfg.count(1000))
    worst, checked, mismatches = 0.0, 0, []
    for sid, s in enumerate(spaces):
        budget_max = oracle_budget(GroupElement(tuple(range(1, s.size))))
        layers = oracle_layers(s, budget_max)
        for h in all_elements(s):
            val = graev_norm(h, s).value
            ref = float(layers[oracle_budget(h), h.to_mask()])
            err = abs(val - ref)
            worst = max(worst, err)
            checked += 1
            if err > cfg.tol and len(mismatches) < 10:
                mismatches.append({"space": sid, "element": list(h.support), "norm": val, "oracle": ref})
    return {"spaces": len(spaces), "elements": checked, "max_abs_err": worst,
            "mismatches": mismatches, "passed": not mismatches and worst <= cfg.tol}


def check_extension_invariance(cfg: SuiteConfig) -> dict:
    spaces = corpus(cfg.seed, cfg.count(1000))
    ext_bad = 0
    pairs = 0
    for s in spaces:
        for x in range(s.size):
            for y in range(s.size):
                gx = GroupElement.of([x])
                gy = GroupElement.of([y])
                pairs += 1
                if graev_dist(gx, gy, s) != s.distance(x, y):
                    ext_bad += 1
    rng = stream(cfg.seed, "invariance")
    inv_bad = 0
    trials = cfg.count(10000)
    for _ in range(trials):
        s = spaces[int(rng.integers(len(spaces)))]
        g, h, f = (random_element(rng, s) for _ in range(3))
        if graev_dist(g + f, h + f, s) != graev_dist(g, h, s):
            inv_bad += 1
    return {"singleton_pairs": pairs, "extension_failures": ext_bad, "triples": trials,
            "invariance_failures": inv_bad, "passed": ext_bad == 0 and inv_bad == 0}


def check_prenorm(cfg: SuiteConfig) -> dict:
    spaces = corpus(cfg.seed, cfg.count(1000))
    rng = stream(cfg.seed, "prenorm")
    trials = cfg.count(10000)
    sub_bad = wit_bad = 0
    for _ in range(trials):
        s = spaces[int(rng.integers(len(spaces)))]
        g, h = random_element(rng, s), random_element(rng, s)
        ng, nh, ngh = graev_norm(g, s), graev_norm(h, s), graev_norm(g + h, s)
        if ngh.value > ng.value + nh.value + cfg.tol or min(ng.value, nh.value, ngh.value) < 0:
            sub_bad += 1
        for res, el in ((ng, g), (nh, h), (ngh, g + h)):
            if check_matching(el, res.witness) or res.value != res.witness.weight:
                wit_bad += 1
    zero_ok = all(graev_norm(ZERO, s).value == 0.0 for s in spaces)
    return {"pairs": trials, "subadditivity_failures": sub_bad, "witness_failures": wit_bad,
            "zero_norm_ok": zero_ok, "passed": sub_bad == 0 and wit_bad == 0 and zero_ok}


def check_maximality(cfg: SuiteConfig) -> dict:
    spaces = corpus(cfg.seed, cfg.count(1000))
    rng = stream(cfg.seed, "maximality")
    trials = cfg.count(1000)
    below = grew = changed = not_reduced = 0
    for _ in range(trials):
        s = spaces[int(rng.integers(len(spaces)))]
        q = int(rng.integers(1, 7))
        rep = Representation(tuple((int(a), int(b)) for a, b in rng.integers(0, s.size, size=(q, 2))))
        w = rep.weight(s)
        el = rep.element
        if w < graev_norm(el, s).value - cfg.tol:
            below += 1
        red = reduce_representation(rep, s)
        if red.weight(s) > w + cfg.tol:
            grew += 1
        if red.element != el:
            changed += 1
        ent = red.entries()
        if len(set(ent)) != len(ent) or not set(ent) <= set(rep.entries()):
            not_reduced += 1
    return {"representations": trials, "weight_below_norm": below, "reduction_increased_weight": grew,
            "reduction_changed_element": changed, "reduction_not_reduced": not_reduced,
            "passed": below == grew == changed == not_reduced == 0}


def random_sequence(rng, n_points: int, max_len: int = 6) -> PseudometricSequence:
    L = int(rng.integers(1, max_len + 1))
    mats = []
    for _ in range(L):
        scale = math.exp(rng.uniform(math.log(1e-3), math.log(0.3)))
        a = rng.uniform(0, 1, size=(n_points, n_points))
        a[rng.random((n_points, n_points)) < 0.1] = 0.0
        a = np.triu(a, 1)
        mats.append(scale * metric_closure(a + a.T))
    return PseudometricSequence.of(mats, "repeat-last")


def check_ball_inclusion(cfg: SuiteConfig) -> dict:
    rng = stream(cfg.seed, "ball")
    trials = cfg.count(500)
    in_ball = failures = 0
    examples = []
    for t in range(trials):
        N = int(rng.integers(2, 9))
        seq = random_sequence(rng, N)
        rho = combine_sup(seq)
        for g in all_elements(rho):
            if not graev_norm(g, rho).value < 0.5:
                continue
            in_ball += 1
            w = wd_witness_from_ball(g, seq, rho)
            problems = check_witness(g, w, seq, buckets=True)
            if problems:
                failures += 1
                if len(examples) < 5:
                    examples.append({"trial": t, "element": list(g.support), "problems": problems})
    return {"sequences": trials, "elements_in_ball": in_ball, "failures": failures,
            "examples": examples, "passed": failures == 0 and in_ball > 0}


def check_wd_refutation(cfg: SuiteConfig) -> dict:
    rng = stream(cfg.seed, "wd")
    # constant-distance family: every distinct pair is at distance >= 1, so W_n = {0}
    spaces = 0
    not_refuted = 0
    for _ in range(cfg.count(20)):
        N = int(rng.integers(2, 7))
        L = int(rng.integers(1, 4))
        mats = []
        for _ in range(L):
            a = np.triu(rng.uniform(1, 2, size=(N, N)), 1)
            mats.append(metric_closure(a + a.T))
        seq = PseudometricSequence.of(mats)
        spaces += 1
        n_max = int(rng.integers(1, 7))
        for mask in range(2, 1 << N, 2):
            v = wd_membership(GroupElement.from_mask(mask), seq, n_max)
            if v.status != "refuted":
                not_refuted += 1
    cases = cfg.count(200)
    contradictions = invalid = certified = 0
    for _ in range(cases):
        N = int(rng.integers(2, 8))
        seq = _random_wd_sequence(rng, N)
        g = GroupElement(tuple(int(i) + 1 for i in np.flatnonzero(rng.random(N - 1) < 0.5)))
        n_max = int(rng.integers(1, 7))
        cert = certify_reduced(g, seq, n_max)
        found = refute_bounded(g, seq, n_max)
        if cert is not None:
            certified += 1
            if check_witness(g, cert, seq):
                invalid += 1
            if found is None:
                contradictions += 1
        if found is not None and (check_witness(g, found, seq) or found.max_index > n_max):
            invalid += 1
    return {"constant_spaces": spaces, "not_refuted": not_refuted, "random_cases": cases,
            "certified": certified, "contradictions": contradictions, "invalid_witnesses": invalid,
            "passed": not_refuted == 0 and contradictions == 0 and invalid == 0}


def _random_wd_sequence(rng, N):
    L = int(rng.integers(1, 7))
    mats = []
    for _ in range(L):
        a = np.triu(rng.uniform(0, 3, size=(N, N)), 1)
        mats.append(metric_closure(a + a.T))
    return PseudometricSequence.of(mats, "repeat-last")


LAB_COMPLETE = ("converging-clusters", "merging-clusters", "constant", "adversarial-noise")


def check_completeness(cfg: SuiteConfig) -> dict:
    cases = cfg.count(100)
    counts: dict[str, int] = {}
    bad = []
    for i in range(cases):
        scenario = LAB_COMPLETE[i % len(LAB_COMPLETE)]
        n = 1 + (i // len(LAB_COMPLETE)) % 4
        if scenario == "merging-clusters":
            n = max(n, 2)
        seq = generate_sequence(scenario, cfg.seed * 1000 + i, n)
        rep = analyze_cauchy(seq, tol=cfg.lab_tol)
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
        ok = (rep.verdict in (CONVERGED, ESCAPED) and len(rep.limit) <= n
              and rep.tail_distance < cfg.lab_tol and rep.verdict == seq.label)
        if not ok:
            bad.append({"case": i, "scenario": scenario, "n": n, "verdict": rep.verdict, "label": seq.label})
    return {"cases": cases, "verdicts": dict(sorted(counts.items())), "failures": bad[:10],
            "failure_count": len(bad), "passed": not bad}


def check_incompleteness(cfg: SuiteConfig) -> dict:
    cases = cfg.count(20)
    bad = []
    worst = math.inf
    for i in range(cases):
        seq = generate_sequence("drift-to-boundary", cfg.seed * 1000 + i, 1 + i % 2)
        rep = analyze_cauchy(seq, tol=cfg.lab_tol)
        sep = ground_separation(seq) if rep.verdict == NO_LIMIT else 0.0
        worst = min(worst, sep)
        if rep.verdict != NO_LIMIT or not sep > SEPARATION_FACTOR * cfg.lab_tol:
            bad.append({"case": i, "verdict": rep.verdict, "separation": sep})
    return {"cases": cases, "min_ground_separation": worst, "failures": bad, "passed": not bad}


def check_dichotomy(cfg: SuiteConfig) -> dict:
    cases = cfg.count(100)
    rows = violations = 0
    approach = separate = 0
    for i in range(cases):
        seq = generate_sequence("finite-twins", cfg.seed * 1000 + i, 1 + i % 4)
        rep = analyze_cauchy(seq, tol=cfg.lab_tol)
        if rep.verdict not in (CONVERGED, ESCAPED) or len(rep.dichotomy) != seq.n:
            violations += 1
            continue
        for row in rep.dichotomy:
            rows += 1
            approach += row["approaches"]
            separate += row["separated"]
            if not row["exactly_one"]:
                violations += 1
    return {"cases": cases, "rows": rows, "approaching": approach, "separated": separate,
            "violations": violations, "passed": violations == 0}


CRITERIA = [
    ("01-oracle-equivalence", check_oracle_equivalence),
    ("02-extension-invariance", check_extension_invariance),
    ("03-prenorm", check_prenorm),
    ("04-maximality", check_maximality),
    ("05-ball-inclusion", check_ball_inclusion),
    ("06-wd-refutation", check_wd_refutation),
    ("07-completeness", check_completeness),
    ("08-incompleteness", check_incompleteness),
    ("09-dichotomy", check_dichotomy),
]


def run_suite(cfg: SuiteConfig) -> dict:
    results = {name: fn(cfg) for name, fn in CRITERIA}
    return {
        "version": __version__,
        "generator": GENERATOR_NAME,
        "seed": cfg.seed,
        "quick": cfg.quick,
        "criteria": dict(sorted(results.items())),
        "passed": all(r["passed"] for r in results.values()),
    }
