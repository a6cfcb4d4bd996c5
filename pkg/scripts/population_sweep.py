#!/usr/bin/env python3
"""Population sweep: minimum r_mean for N = 20, 30, 40, 50 on one seed.

Writes sweep.csv and sweep_summary.json to --out and prints the minima.
"""
import argparse
import json
from pathlib import Path

from crowdnet.cli import cmd_sweep
from crowdnet.config import parse_config

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=str(ROOT / "scenarios" / "population_sweep.conf"))
    parser.add_argument("--n", default="20,30,40,50")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", default="out/sweep")
    args = parser.parse_args()
    config = parse_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    values = [int(v) for v in args.n.split(",")]
    summary = cmd_sweep(config, values, Path(args.out))
    mins = summary["min_r_mean"]
    for n in values:
        print(f"N={n:3d}  min r_mean = {mins[str(n)]:.3f}")
    ordered = [mins[str(n)] for n in values]
    print("monotone non-increasing:", all(b <= a for a, b in zip(ordered, ordered[1:])))
    print(json.dumps({"out": args.out}))


if __name__ == "__main__":
    main()
