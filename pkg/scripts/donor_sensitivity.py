#!/usr/bin/env python3
"""Compare richest-first donor selection with uniform random donors for strategies B and C."""

import argparse

from wealthflow import SimConfig, StrategyB, StrategyC
from wealthflow.engine import CANONICAL_SEEDS
from wealthflow.experiment import run_batch


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    for strategy in (StrategyB(100, 20), StrategyC(100, 60, 40, 100, 60, 40)):
        for random_donors in (False, True):
            cfg = SimConfig(strategy=strategy, random_donors=random_donors)
            agg = run_batch(cfg, CANONICAL_SEEDS, workers=args.workers).aggregates
            mode = "random" if random_donors else "richest-first"
            print(
                f"{strategy.tag} {mode:>13}: return periods {agg['mean_return_periods']:7.1f}"
                f"  variance {agg['mean_variance']:8.1f}"
            )


if __name__ == "__main__":
    main()
