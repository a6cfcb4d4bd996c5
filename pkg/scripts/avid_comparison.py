#!/usr/bin/env python3
"""Adaptive vs non-adaptive crowd (AVID on/off) at the neck, over several seeds."""
import argparse
from pathlib import Path

from crowdnet.cli import cmd_compare
from crowdnet.config import ScenarioConfig, parse_config


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="scenario file; built-in defaults if omitted")
    parser.add_argument("--seeds", default="1,2,3,4,5")
    parser.add_argument("--out", default="out/avid")
    args = parser.parse_args()
    base = parse_config(args.config) if args.config else ScenarioConfig()
    print(f"{'seed':>4} {'dv_mean':>9} {'dr_mean':>9} {'N_obs a/n':>11} {'peak it a/n':>12}")
    for seed in (int(s) for s in args.seeds.split(",")):
        s = cmd_compare(base.replace(seed=seed), Path(args.out) / f"seed{seed}")
        a, b, d = s["adaptive"], s["non_adaptive"], s["difference"]
        print(f"{seed:>4} {d['v_mean']:>+9.3f} {d['r_mean']:>+9.3f} "
              f"{a['n_obs_total']:>5}/{b['n_obs_total']:<5} "
              f"{a['peak_n_neck_iteration']:>5}/{b['peak_n_neck_iteration']:<5}")


if __name__ == "__main__":
    main()
