#!/usr/bin/env python3
"""Utility of the thresholded solver as the decay parameter varies,
tabulated over a range of per-part caps on one synthetic graph.

Example:
    python3 scripts/epsilon_sensitivity.py --n 2000 --m0 20 --m 20 \
        --caps 50,100,150 --epsilons 0.2,0.1,0.05,0.02,0.01,0.005
"""

import argparse
import csv
import sys

import twinopt as t


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--m0", type=int, default=20)
    parser.add_argument("--m", type=int, default=20)
    parser.add_argument("--groups", type=int, default=5)
    parser.add_argument("--caps", default="50,100")
    parser.add_argument("--epsilons", default="0.2,0.1,0.05,0.02,0.01,0.005")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--out", default="epsilon_table.csv")
    args = parser.parse_args()

    graph = t.assign_weights_uniform(t.gen_ba(args.n, args.m0, args.m, args.seed),
                                     0.0, 1.0, args.seed + 1)
    parts = t.assign_groups(args.n, args.groups, args.seed + 2)
    ground = t.GroundSet(args.n)
    caps = [int(c) for c in args.caps.split(",")]
    epsilons = [float(e) for e in args.epsilons.split(",")]

    table = {}
    for eps in epsilons:
        for cap in caps:
            report = t.twin_greedy_fast(t.CutMonitorObjective(graph),
                                        t.PartitionMatroid(parts, cap), ground, eps)
            table[(eps, cap)] = report.f_star

    header = ["epsilon"] + [f"k={cap}" for cap in caps]
    print("  ".join(f"{h:>12s}" for h in header))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for eps in epsilons:
            row = [table[(eps, cap)] for cap in caps]
            print(f"{eps:12.3f}  " + "  ".join(f"{v:12.1f}" for v in row))
            writer.writerow([eps] + [repr(v) for v in row])
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
