"""Scenario orchestration: initialisation, the per-iteration schedule and logging.

Each iteration runs in bulk-synchronous phases. Adaptation reads only the
previous snapshot, combination reads only the intermediates, and motion
reads the combined estimates, so agents never observe each other's
half-updated state.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import estimation, geometry, metrics, motion
from .config import ScenarioConfig
from .errors import ConfigError, CrowdnetError, SimulationError
from .geometry import Corridor, Region

MIN_SPAWN_SPACING = 1.0
SPAWN_RETRY_CAP = 100_000


@dataclass(frozen=True)
class TargetState:
    position: np.ndarray
    model: str = "static"
    waypoints: tuple[tuple[float, float], ...] = ()
    speed: float = 0.0
    segment: int = 0  # index of the waypoint currently being approached


def initial_target(config: ScenarioConfig) -> TargetState:
    if config.target_model == "static":
        return TargetState(np.array(config.target_position, dtype=float))
    wps = config.target_waypoints
    return TargetState(np.array(wps[0], dtype=float), "waypoints", wps, config.target_speed,
                       min(1, len(wps) - 1))


def advance_target(target: TargetState, dt: float) -> TargetState:
    """Move a waypoint target ``speed * dt`` along its polyline, stopping at the end."""
    if target.model == "static":
        return target
    pos = target.position.copy()
    seg = target.segment
    remaining = target.speed * dt
    wps = target.waypoints
    while remaining > 0 and seg < len(wps):
        goal = np.asarray(wps[seg], dtype=float)
        gap = float(np.hypot(*(goal - pos)))
        if gap > remaining:
            pos = pos + (goal - pos) * (remaining / gap)
            remaining = 0.0
        else:
            pos = goal
            remaining -= gap
            if seg == len(wps) - 1:
                break
            seg += 1
    return TargetState(pos, target.model, wps, target.speed, seg)


@dataclass
class World:
    """State of every agent at the start of an iteration (arrays indexed by agent)."""

    iteration: int
    positions: np.ndarray
    velocities: np.ndarray
    w_est: np.ndarray
    vg_est: np.ndarray
    r_k: np.ndarray
    alpha_k: np.ndarray
    widths: np.ndarray
    regions: list
    target: TargetState
    rng: np.random.Generator
    neighborhoods: list = field(default_factory=list)

    @property
    def n_agents(self) -> int:
        return len(self.positions)

    def copy(self) -> "World":
        return copy.deepcopy(self)


@dataclass(frozen=True)
class Scenario:
    """Immutable per-run context derived from a config."""

    config: ScenarioConfig
    corridor: Corridor
    params: motion.MotionParams
    band: metrics.NeckBand

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "Scenario":
        corridor = config.corridor()
        neck_x, _ = geometry.neck_location(corridor)
        half = config.neck_half_width if config.neck_half_width is not None else 2 * config.radius
        return cls(config, corridor, config.motion_params(), metrics.NeckBand(neck_x, half))


@dataclass
class TrajectoryLog:
    """Per-iteration snapshots; frame 0 is the initial state."""

    frames: list = field(default_factory=list)

    def record(self, world: World):
        self.frames.append({
            "iteration": world.iteration,
            "positions": world.positions.copy(),
            "velocities": world.velocities.copy(),
            "regions": [r.value for r in world.regions],
            "r": world.r_k.copy(),
            "alpha": world.alpha_k.copy(),
            "width": world.widths.copy(),
            "target": world.target.position.copy(),
        })

    def positions(self) -> np.ndarray:
        """(frames, N, 2) array."""
        return np.stack([f["positions"] for f in self.frames])

    def target_path(self) -> np.ndarray:
        return np.stack([f["target"] for f in self.frames])

    def jsonl_lines(self):
        for f in self.frames:
            for k in range(len(f["positions"])):
                yield json.dumps({
                    "iteration": f["iteration"], "agent": k,
                    "x": float(f["positions"][k, 0]), "y": float(f["positions"][k, 1]),
                    "vx": float(f["velocities"][k, 0]), "vy": float(f["velocities"][k, 1]),
                    "region": f["regions"][k], "r": float(f["r"][k]),
                    "alpha": float(f["alpha"][k]), "width": float(f["width"][k]),
                }, separators=(",", ":"))

    def to_jsonl(self) -> str:
        return "".join(line + "\n" for line in self.jsonl_lines())


def spawn_positions(config: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniform rejection sampling in the spawn box with a minimum pairwise spacing."""
    x0, x1, y0, y1 = config.spawn_box
    pts: list[np.ndarray] = []
    tries = 0
    while len(pts) < config.n_agents:
        if tries >= SPAWN_RETRY_CAP:
            raise ConfigError(f"could not place {config.n_agents} agents at spacing "
                              f"{MIN_SPAWN_SPACING} in the spawn box", key="spawn_box")
        tries += 1
        p = np.array([rng.uniform(x0, x1), rng.uniform(y0, y1)])
        if all(np.hypot(*(p - q)) >= MIN_SPAWN_SPACING for q in pts):
            pts.append(p)
    return np.array(pts)


def _local_geometry(scenario: Scenario, positions: np.ndarray):
    widths = np.empty(len(positions))
    nearest = []
    for k, x in enumerate(positions):
        widths[k] = geometry.tangent_chord_width(scenario.corridor, x).width
        nearest.append(geometry.nearest_obstacle_point(scenario.corridor, x))
    return widths, nearest


def _avid(scenario: Scenario, widths: np.ndarray):
    cfg, params = scenario.config, scenario.params
    n = len(widths)
    if not cfg.avid_enabled:
        return np.full(n, params.r), np.full(n, params.alpha)
    pairs = [motion.avid_update(w, params) for w in widths]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def init_scenario(config: ScenarioConfig):
    """Build ``(scenario, world)`` for iteration 0."""
    scenario = Scenario.from_config(config)
    rng = np.random.default_rng(config.seed)
    positions = spawn_positions(config, rng)
    n = len(positions)
    widths, nearest = _local_geometry(scenario, positions)
    r_k, alpha_k = _avid(scenario, widths)
    regions = [geometry.classify_region(scenario.corridor, x, x, config.d, nb.distance)
               for x, nb in zip(positions, nearest)]
    world = World(
        iteration=0,
        positions=positions,
        velocities=np.zeros((n, 2)),
        w_est=positions.copy(),
        vg_est=np.zeros((n, 2)),
        r_k=r_k,
        alpha_k=alpha_k,
        widths=widths,
        regions=regions,
        target=initial_target(config),
        rng=rng,
        neighborhoods=estimation.build_neighborhoods(positions, config.radius),
    )
    return scenario, world


def adapt_phase(world: World, measurements, config: ScenarioConfig, order: Sequence[int] | None = None):
    """Intermediate estimates (psi, phi) for every agent.

    Each agent reads only the previous snapshot, so any processing ``order``
    gives the same result.
    """
    n = world.n_agents
    psi = np.empty((n, 2))
    phi = np.empty((n, 2))
    for k in (range(n) if order is None else order):
        psi[k] = estimation.adapt_target(world.w_est[k], world.positions[k], measurements[k],
                                         config.mu)
        phi[k] = estimation.adapt_group_velocity(world.vg_est[k], world.velocities[k], config.nu)
    return psi, phi


def step(scenario: Scenario, world: World, order: Sequence[int] | None = None) -> World:
    """Advance one iteration and return the new world; ``world`` is left untouched
    apart from its random generator, which is shared with the result."""
    cfg, params, corridor = scenario.config, scenario.params, scenario.corridor
    n = world.n_agents
    it = world.iteration + 1
    x = world.positions
    agent = None
    try:
        # (1) neighbourhoods
        if cfg.rebuild_neighborhoods or not world.neighborhoods:
            hoods = estimation.build_neighborhoods(x, cfg.radius)
        else:
            hoods = world.neighborhoods
        weights = estimation.uniform_combination_weights(hoods)
        # (2) measurements; noise drawn in agent order
        noise = (world.rng.normal(0.0, cfg.noise_std, size=n) if cfg.noise_std > 0
                 else np.zeros(n))
        measurements = []
        for agent in range(n):
            m = estimation.measure_target(world.target.position, x[agent], 0.0)
            measurements.append(estimation.TargetMeasurement(max(m.distance + noise[agent], 0.0),
                                                             m.direction))
        agent = None
        # (3) adapt, (4) combine
        psi, phi = adapt_phase(world, measurements, cfg, order)
        w_est, vg_est = estimation.combine_estimates(psi, phi, weights, weights)
        # (5) widths, (6) AVID
        widths, nearest = _local_geometry(scenario, x)
        r_k, alpha_k = _avid(scenario, widths)
        # (7) regions from the look-ahead with the previous velocity
        regions = []
        for agent in range(n):
            candidate = x[agent] + params.dt * world.velocities[agent]
            regions.append(geometry.classify_region(corridor, x[agent], candidate, cfg.d,
                                                    nearest[agent].distance))
        # (8) velocities, (9) integration
        new_x = x.copy()
        new_v = np.zeros((n, 2))
        for agent in range(n):
            if regions[agent] is Region.III:
                continue  # stationary this step
            if np.hypot(*(w_est[agent] - x[agent])) < 1e-9:
                v_a = np.zeros(2)
            else:
                v_a = motion.pursuit_avoidance_velocity(x[agent], w_est[agent], regions[agent],
                                                        nearest[agent].point, params)
            others = hoods[agent].others()
            delta = motion.local_distance_term(x[agent], x[list(others)], r_k[agent])
            v = motion.compose_velocity(v_a, vg_est[agent], delta, alpha_k[agent], params)
            pos, moved = motion.integrate_position(x[agent], v, corridor, params)
            if moved:
                new_x[agent] = pos
                new_v[agent] = v
        agent = None
    except CrowdnetError as exc:
        raise SimulationError(str(exc), agent=agent, iteration=it) from exc
    return World(
        iteration=it,
        positions=new_x,
        velocities=new_v,
        w_est=w_est,
        vg_est=vg_est,
        r_k=r_k,
        alpha_k=alpha_k,
        widths=widths,
        regions=regions,
        target=advance_target(world.target, params.dt),
        rng=world.rng,
        neighborhoods=hoods,
    )


def measure(scenario: Scenario, world: World) -> metrics.MetricsRecord:
    hoods = estimation.build_neighborhoods(world.positions, scenario.config.radius)
    return metrics.MetricsRecord(
        iteration=world.iteration,
        v_mean=metrics.mean_speed(world.velocities),
        r_mean=metrics.mean_neighbor_distance(world.positions, hoods),
        n_obs=metrics.count_obstructed(world.regions),
        n_neck=metrics.count_at_neck(world.positions, scenario.band),
    )


@dataclass
class RunResult:
    scenario: Scenario
    metrics: list
    trajectory: TrajectoryLog
    world: World


def run(config: ScenarioConfig) -> RunResult:
    scenario, world = init_scenario(config)
    log = TrajectoryLog()
    log.record(world)
    records = []
    for _ in range(config.iterations):
        world = step(scenario, world)
        log.record(world)
        records.append(measure(scenario, world))
    return RunResult(scenario, records, log, world)
