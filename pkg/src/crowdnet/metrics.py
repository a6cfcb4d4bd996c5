"""Per-iteration crowd observables and their CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .estimation import Neighborhood
from .geometry import Region

CSV_COLUMNS = ("iteration", "v_mean", "r_mean", "n_obs", "n_neck")


@dataclass(frozen=True)
class MetricsRecord:
    iteration: int
    v_mean: float
    r_mean: float
    n_obs: int
    n_neck: int

    def row(self) -> list[str]:
        return [str(self.iteration), f"{self.v_mean:.12g}", f"{self.r_mean:.12g}",
                str(self.n_obs), str(self.n_neck)]


@dataclass(frozen=True)
class NeckBand:
    center: float
    half_width: float

    def __post_init__(self):
        if self.half_width < 0:
            raise InputError("neck band half-width must be non-negative")


def mean_speed(velocities) -> float:
    v = np.asarray(velocities, dtype=float).reshape(-1, 2)
    if len(v) == 0:
        raise InputError("mean speed of an empty population")
    return float(np.hypot(v[:, 0], v[:, 1]).mean())


def mean_neighbor_distance(positions, neighborhoods: Sequence[Neighborhood]) -> float:
    """Average over agents of the mean distance to their neighbours.

    Agents without neighbours are left out of the average; 0 if all are isolated.
    """
    x = np.asarray(positions, dtype=float).reshape(-1, 2)
    per_agent = []
    for nb in neighborhoods:
        others = nb.others()
        if not others:
            continue
        diff = x[list(others)] - x[nb.agent_id]
        per_agent.append(np.hypot(diff[:, 0], diff[:, 1]).mean())
    return float(np.mean(per_agent)) if per_agent else 0.0


def count_obstructed(regions: Iterable[Region]) -> int:
    return sum(1 for r in regions if r is Region.II)


def count_at_neck(positions, band: NeckBand) -> int:
    x = np.asarray(positions, dtype=float).reshape(-1, 2)[:, 0]
    return int(np.count_nonzero(np.abs(x - band.center) <= band.half_width))


def metrics_csv(records: Iterable[MetricsRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def read_metrics_csv(text: str) -> list[MetricsRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [MetricsRecord(int(r["iteration"]), float(r["v_mean"]), float(r["r_mean"]),
                          int(r["n_obs"]), int(r["n_neck"])) for r in rows]
