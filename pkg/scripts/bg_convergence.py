#!/usr/bin/env python3
"""Track how fast the baseline money distribution approaches the exponential law.

For each seed, records variance and the KS distance to Exponential(mean M)
at a grid of ticks, then prints the per-tick medians and writes a CSV.
"""

import argparse
import csv
from pathlib import Path
from statistics import median

from wealthflow import SimConfig, run

TICKS = (100, 1000, 3000, 9000, 20000, 40000, 80000)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1000, 2000, 3000, 4000, 5000])
    ap.add_argument("--max-tick", type=int, default=TICKS[-1])
    ap.add_argument("--out", type=Path, default=Path("results/bg_convergence.csv"))
    args = ap.parse_args()
    ticks = tuple(t for t in TICKS if t <= args.max_tick)

    rows = []
    for seed in args.seeds:
        result = run(SimConfig(seed=seed, max_ticks=ticks[-1], snapshot_ticks=ticks))
        for t in ticks:
            snap = result.snapshots[t]
            rows.append({"seed": seed, "tick": t, "variance": snap["variance"], "ks_stat": snap["ks_stat"]})

    print(f"{'tick':>6} {'median variance':>16} {'median KS':>10}")
    for t in ticks:
        at = [r for r in rows if r["tick"] == t]
        print(f"{t:6d} {median(r['variance'] for r in at):16.1f} {median(r['ks_stat'] for r in at):10.4f}")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["seed", "tick", "variance", "ks_stat"])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
