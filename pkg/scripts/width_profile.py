#!/usr/bin/env python3
"""Tangent-chord width along the corridor mid-curve, and the located neck."""
import argparse

import numpy as np

from crowdnet.config import ScenarioConfig, parse_config
from crowdnet.geometry import mid_curve_width, neck_location


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config")
    parser.add_argument("--step", type=float, default=5.0)
    args = parser.parse_args()
    corridor = (parse_config(args.config) if args.config else ScenarioConfig()).corridor()
    lo, hi = corridor.x_domain
    for x in np.arange(lo, hi + 1e-9, args.step):
        gap = corridor.upper(x) - corridor.lower(x)
        print(f"x={x:7.2f}  vertical gap={gap:7.3f}  chord width={mid_curve_width(corridor, x):7.3f}")
    x_star, w = neck_location(corridor)
    print(f"neck at x={x_star:.3f}, width {w:.3f}")


if __name__ == "__main__":
    main()
