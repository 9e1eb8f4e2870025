"""Command line entry point: ``graev <subcommand> ...``.

Exit codes: 0 success, 1 a refuted property or failed validation, 2 usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .boolean_group import GroupElement, parse_element
from .errors import BallConditionError, CapacityError, GraevError, GuardError, InvalidSpaceError, StructuralError
from .graev_metric import graev_dist, graev_norm, oracle_budget, oracle_layers
from .ground_space import combine_sup, load_sequence, load_space, validate_space
from .neighborhood import ball_witness, ball_membership, wd_membership
from .rng import GENERATOR_NAME, stream


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    space: str | None = None
    metrics: str | None = None
    elements: dict = field(default_factory=dict)
    seed: int = 0
    tol: float | None = None
    match_limit: int | None = None
    out: str | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        elements = {k: getattr(ns, k) for k in ("element", "g", "h") if getattr(ns, k, None) is not None}
        known = {"cmd", "space", "metrics", "element", "g", "h", "seed", "tol", "match_limit", "out"}
        extra = {k: v for k, v in vars(ns).items() if k not in known}
        return cls(ns.cmd, getattr(ns, "space", None), getattr(ns, "metrics", None), elements,
                   getattr(ns, "seed", 0) or 0, getattr(ns, "tol", None), ns.match_limit, getattr(ns, "out", None), extra)


def _element(text: str, space) -> GroupElement:
    try:
        g = parse_element(text)
    except ValueError as exc:
        raise UsageError(f"bad element list {text!r}") from exc
    if g.support and g.support[-1] >= space.size:
        raise UsageError(f"element {text!r} uses a point outside the space (|X| = {space.size})")
    return g


def _space(cfg: RunConfig):
    if not cfg.space:
        raise UsageError("--space is required")
    try:
        return load_space(cfg.space)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {cfg.space}: {exc}") from exc


def _metrics(cfg: RunConfig, space):
    if not cfg.metrics:
        raise UsageError("--metrics is required")
    try:
        return load_sequence(cfg.metrics, space)
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read {cfg.metrics}: {exc}") from exc


def cmd_validate(cfg):
    rep = validate_space(_space(cfg))
    return (0 if rep.ok else 1), rep.to_json()


def cmd_norm(cfg):
    s = _space(cfg)
    return 0, graev_norm(_element(cfg.elements["element"], s), s, cfg.match_limit).to_json()


def cmd_dist(cfg):
    s = _space(cfg)
    g, h = _element(cfg.elements["g"], s), _element(cfg.elements["h"], s)
    return 0, {"value": graev_dist(g, h, s, cfg.match_limit)}


def cmd_ball(cfg):
    s = _space(cfg)
    g = _element(cfg.elements["element"], s)
    r = cfg.extra["radius"]
    return 0, {"inside": ball_membership(g, s, r), "norm": graev_norm(g, s, cfg.match_limit).value, "radius": r}


def cmd_oracle_check(cfg):
    s = _space(cfg)
    s.require_valid()
    rng = stream(cfg.seed, "oracle-check")
    max_support = min(cfg.extra["max_support"], s.size - 1)
    trials = cfg.extra["trials"]
    budgets = {}
    mismatches = []
    worst = 0.0
    for t in range(trials):
        k = int(rng.integers(0, max_support + 1))
        h = GroupElement.of((rng.choice(s.size - 1, size=k, replace=False) + 1).tolist())
        q = oracle_budget(h)
        if q not in budgets:
            budgets[q] = oracle_layers(s, q)[q]
        ref = float(budgets[q][h.to_mask()])
        val = graev_norm(h, s, cfg.match_limit).value
        err = abs(val - ref)
        worst = max(worst, err)
        if err > 1e-9:
            mismatches.append({"trial": t, "element": list(h.support), "norm": val, "oracle": ref})
    out = {"trials": trials, "seed": cfg.seed, "generator": GENERATOR_NAME,
           "mismatches": mismatches, "max_abs_err": worst}
    return (1 if mismatches else 0), out


def cmd_wd_check(cfg):
    s = _space(cfg)
    seq = _metrics(cfg, s)
    g = _element(cfg.elements["element"], s)
    return 0, wd_membership(g, seq, cfg.extra["nmax"]).to_json()


def cmd_wd_witness(cfg):
    s = _space(cfg)
    seq = _metrics(cfg, s)
    g = _element(cfg.elements["element"], s)
    rho = combine_sup(seq, s.labels)
    try:
        bw = ball_witness(g, seq, rho)
    except BallConditionError as exc:
        return 1, {"error": str(exc), "norm": graev_norm(g, rho).value}
    return 0, {"norm": bw.norm, "levels": bw.levels, "witness": bw.witness.to_json()}


def cmd_cauchy_lab(cfg):
    from .completeness_lab import run_lab

    tol = cfg.tol if cfg.tol is not None else 1e-6
    report = run_lab(cfg.extra["scenario"], cfg.seed, tol)
    return (0 if report["all_agree"] else 1), report


def cmd_suite(cfg):
    from .suite import SuiteConfig, run_suite

    report = run_suite(SuiteConfig(seed=cfg.seed, quick=cfg.extra["quick"]))
    return (0 if report["passed"] else 1), report


COMMANDS = {
    "validate-metric": cmd_validate,
    "norm": cmd_norm,
    "dist": cmd_dist,
    "ball": cmd_ball,
    "oracle-check": cmd_oracle_check,
    "wd-check": cmd_wd_check,
    "wd-witness": cmd_wd_witness,
    "cauchy-lab": cmd_cauchy_lab,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graev", description=__doc__.splitlines()[0])
    p.add_argument("--match-limit", type=int, default=None,
                   help="largest matched point set (default $GRAEV_MATCH_LIMIT or 20)")
    sub = p.add_subparsers(dest="cmd", required=True)

    def space_cmd(name, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--space", required=True)
        sp.add_argument("--out")
        return sp

    space_cmd("validate-metric", "check the pseudometric axioms")
    sp = space_cmd("norm", "Graev norm of an element")
    sp.add_argument("--element", required=True, help="comma-separated point indices")
    sp = space_cmd("dist", "Graev distance between two elements")
    sp.add_argument("--g", required=True)
    sp.add_argument("--h", required=True)
    sp = space_cmd("ball", "is N(g) < r")
    sp.add_argument("--element", required=True)
    sp.add_argument("--radius", type=float, required=True)
    sp = space_cmd("oracle-check", "compare matching norms with exhaustive representation search")
    sp.add_argument("--max-support", type=int, default=6)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp = space_cmd("wd-check", "membership in W_1 + ... + W_nmax")
    sp.add_argument("--metrics", required=True)
    sp.add_argument("--element", required=True)
    sp.add_argument("--nmax", type=int, default=8)
    sp = space_cmd("wd-witness", "W_D witness for an element of the ball N < 1/2")
    sp.add_argument("--metrics", required=True)
    sp.add_argument("--element", required=True)

    sp = sub.add_parser("cauchy-lab", help="run the Cauchy sequence scenarios")
    sp.add_argument("--scenario", default="all")
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out")
    sp = sub.add_parser("suite", help="run every acceptance property")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--out")
    return p


def run(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.match_limit is None:
        return COMMANDS[cfg.subcommand](cfg)
    saved = os.environ.get("GRAEV_MATCH_LIMIT")
    os.environ["GRAEV_MATCH_LIMIT"] = str(cfg.match_limit)
    try:
        return COMMANDS[cfg.subcommand](cfg)
    finally:
        if saved is None:
            del os.environ["GRAEV_MATCH_LIMIT"]
        else:
            os.environ["GRAEV_MATCH_LIMIT"] = saved


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        code, payload = run(cfg)
    except (UsageError, StructuralError, GuardError, CapacityError, IndexError, ValueError) as exc:
        if isinstance(exc, InvalidSpaceError):
            code, payload = 1, {"error": str(exc)}
        else:
            print(f"graev: error: {exc}", file=sys.stderr)
            return 2
    except GraevError as exc:
        code, payload = 1, {"error": str(exc)}
    text = json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


def _clean(obj):
    """Replace non-finite floats (not valid JSON) by strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


if __name__ == "__main__":
    sys.exit(main())
