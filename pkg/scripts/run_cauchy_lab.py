"""Run the Cauchy-sequence scenarios for a few seeds and print a verdict table.

    python scripts/run_cauchy_lab.py --seeds 0 1 2 --tol 1e-6
"""

import argparse
from collections import Counter

from graev.completeness_lab import DEFAULT_TOL, EXTRA_SCENARIOS, SCENARIOS, run_lab


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    args = p.parse_args()

    tally = Counter()
    print(f"{'scenario':<22}{'n':>3}{'seed':>6}  {'label':<20}{'verdict':<20}tail dist")
    for seed in args.seeds:
        for scenario in SCENARIOS + EXTRA_SCENARIOS:
            for row in run_lab(scenario, seed, args.tol)["scenarios"]:
                tally[(row["scenario"], row["agrees"])] += 1
                tail = row.get("tail_distance")
                tail = f"{tail:.2e}" if isinstance(tail, float) else "-"
                print(f"{row['scenario']:<22}{row['n']:>3}{seed:>6}  {row['label']:<20}{row['verdict']:<20}{tail}")
    print()
    for scenario in SCENARIOS + EXTRA_SCENARIOS:
        ok, bad = tally[(scenario, True)], tally[(scenario, False)]
        print(f"{scenario:<22} agree {ok:>3} / {ok + bad}")


if __name__ == "__main__":
    main()
