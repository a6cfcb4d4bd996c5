"""Command-line front end: ``crowdnet run|compare|sweep``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, parse_config
from .engine import RunResult, run
from .errors import CrowdnetError
from .metrics import CSV_COLUMNS, metrics_csv
from .svg import trajectory_svg

METRIC_NAMES = CSV_COLUMNS[1:]


@dataclass(frozen=True)
class RunManifest:
    config_hash: str
    seed: int
    outputs: dict
    version: str
    duration_s: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8", newline="")


def neck_window_means(result: RunResult) -> dict:
    """Means of each metric over the iterations with at least one agent in the neck band."""
    recs = [m for m in result.metrics if m.n_neck > 0]
    out = {name: (float(np.mean([getattr(m, name) for m in recs])) if recs else None)
           for name in METRIC_NAMES}
    out["window_iterations"] = len(recs)
    out["n_obs_total"] = int(sum(m.n_obs for m in result.metrics))
    out["peak_n_neck_iteration"] = (max(result.metrics, key=lambda m: m.n_neck).iteration
                                    if result.metrics else None)
    return out


def cmd_run(config: ScenarioConfig, out: Path) -> RunManifest:
    start = time.perf_counter()
    out.mkdir(parents=True, exist_ok=True)
    result = run(config)
    paths = {name: str(out / name) for name in
             ("metrics.csv", "trajectory.jsonl", "trajectory.svg", "manifest.json")}
    _write(out / "metrics.csv", metrics_csv(result.metrics))
    _write(out / "trajectory.jsonl", result.trajectory.to_jsonl())
    _write(out / "trajectory.svg", trajectory_svg(result.scenario.corridor,
                                                  result.trajectory.positions(),
                                                  result.trajectory.target_path()))
    manifest = RunManifest(config.digest(), config.seed, paths, __version__,
                           round(time.perf_counter() - start, 3))
    _write(out / "manifest.json", manifest.to_json())
    return manifest


def cmd_compare(config: ScenarioConfig, out: Path) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    runs = {"adaptive": run(config.replace(avid_enabled=True)),
            "non_adaptive": run(config.replace(avid_enabled=False))}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration"] + [f"{name}_{tag}" for name in METRIC_NAMES
                                     for tag in runs])
    for a, b in zip(runs["adaptive"].metrics, runs["non_adaptive"].metrics):
        row_a, row_b = a.row(), b.row()
        writer.writerow([row_a[0]] + [v for i in range(1, len(row_a)) for v in (row_a[i], row_b[i])])
    _write(out / "compare.csv", buf.getvalue())
    summary = {tag: neck_window_means(res) for tag, res in runs.items()}
    summary["difference"] = {
        k: (summary["adaptive"][k] - summary["non_adaptive"][k]
            if summary["adaptive"][k] is not None and summary["non_adaptive"][k] is not None
            else None)
        for k in summary["adaptive"]}
    summary["config_hash"] = config.digest()
    _write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def cmd_sweep(config: ScenarioConfig, values, out: Path) -> dict:
    if not values or any(v < 1 for v in values):
        raise ValueError("sweep values must be positive integers")
    out.mkdir(parents=True, exist_ok=True)
    series = {n: [m.r_mean for m in run(config.replace(n_agents=n)).metrics] for n in values}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["iteration"] + [f"r_mean_n{n}" for n in values])
    for i in range(config.iterations):
        writer.writerow([i + 1] + [f"{series[n][i]:.12g}" for n in values])
    _write(out / "sweep.csv", buf.getvalue())
    summary = {"seed": config.seed, "min_r_mean": {str(n): (min(s) if s else None)
                                                   for n, s in series.items()}}
    _write(out / "sweep_summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crowdnet", description=__doc__)
    p.add_argument("--version", action="version", version=f"crowdnet {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("config")
    r.add_argument("--out", default="out")
    r.add_argument("--seed", type=int)
    r.add_argument("--iterations", type=int)
    c = sub.add_parser("compare", help="adaptive vs non-adaptive on the same seed")
    c.add_argument("config")
    c.add_argument("--out", default="out")
    s = sub.add_parser("sweep", help="r_mean over several population sizes")
    s.add_argument("config")
    s.add_argument("--n", required=True, help="comma-separated populations, e.g. 20,30,40,50")
    s.add_argument("--out", default="out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config)
        out = Path(args.out)
        if args.command == "run":
            changes = {k: v for k, v in (("seed", args.seed), ("iterations", args.iterations))
                       if v is not None}
            if changes:
                config = config.replace(**changes)
            cmd_run(config, out)
        elif args.command == "compare":
            cmd_compare(config, out)
        else:
            try:
                values = [int(v) for v in args.n.split(",") if v.strip()]
            except ValueError:
                raise ValueError(f"--n expects integers, got {args.n!r}") from None
            cmd_sweep(config, values, out)
    except (CrowdnetError, ValueError, OSError) as exc:
        print(f"crowdnet: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
