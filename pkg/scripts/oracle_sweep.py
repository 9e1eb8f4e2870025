"""Compare the matching norm with the exhaustive representation search on random spaces.

Reports max absolute error and the time spent in each solver, per space size.

    python scripts/oracle_sweep.py --spaces 200 --max-points 8
"""

import argparse
import time

import numpy as np

from graev.boolean_group import GroupElement
from graev.graev_metric import graev_norm, oracle_budget, oracle_layers
from graev.rng import stream
from graev.suite import all_elements, random_pseudometric


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--spaces", type=int, default=200)
    p.add_argument("--max-points", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = stream(args.seed, "oracle-sweep")
    rows = {}
    for _ in range(args.spaces):
        N = int(rng.integers(2, args.max_points + 1))
        s = random_pseudometric(rng, N)
        q = oracle_budget(GroupElement(tuple(range(1, N))))  # enough for every element of this space
        t0 = time.perf_counter()
        table = oracle_layers(s, q)[q]
        t1 = time.perf_counter()
        errs = [abs(graev_norm(g, s).value - table[g.to_mask()]) for g in all_elements(s)]
        t2 = time.perf_counter()
        r = rows.setdefault(N, {"spaces": 0, "elements": 0, "err": 0.0, "oracle_s": 0.0, "matching_s": 0.0})
        r["spaces"] += 1
        r["elements"] += len(errs)
        r["err"] = max(r["err"], float(np.max(errs)))
        r["oracle_s"] += t1 - t0
        r["matching_s"] += t2 - t1

    print(f"{'|X|':>4}{'spaces':>8}{'elements':>10}{'max err':>10}{'oracle s':>10}{'matching s':>12}")
    for N in sorted(rows):
        r = rows[N]
        print(f"{N:>4}{r['spaces']:>8}{r['elements']:>10}{r['err']:>10.1e}{r['oracle_s']:>10.2f}{r['matching_s']:>12.2f}")


if __name__ == "__main__":
    main()
