"""Scenario configuration and its flat ``key = value`` text format.

One assignment per line, ``#`` starts a comment, arrays use JSON brackets::

    n_agents = 40
    upper_wall = [20.8, -0.16, 0.008]   # ascending powers of x
    target_waypoints = [[-52, 33], [12, 18.7]]

Unset keys take the defaults below; unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError
from .geometry import DEFAULT_LOWER, DEFAULT_UPPER, Corridor, WallFunction
from .motion import MotionParams

TARGET_MODELS = ("static", "waypoints")


def _default_waypoints():
    # points on the corridor mid-curve, left to right
    return ((-44.0, 33.29), (-38.0, 29.35), (-32.0, 25.99), (-26.0, 23.21), (-20.0, 21.0),
            (-14.0, 19.37), (-8.0, 18.31), (-2.0, 17.83), (4.0, 17.93), (10.0, 18.6),
            (14.0, 19.37))


@dataclass(frozen=True)
class ScenarioConfig:
    n_agents: int = 40
    iterations: int = 120
    seed: int = 1
    dt: float = 0.5
    radius: float = 3.5          # neighbourhood radius R
    r: float = 3.0
    r_min: float = 2.0
    d: float = 2.0
    l_s: float = 16.0
    alpha: float = 2.0
    alpha_max: float = 4.0
    lam: float = 0.5
    gamma: float = 2.0
    eta: float = 2.0
    mu: float = 0.5
    nu: float = 0.5
    noise_std: float = 0.1
    avid_enabled: bool = True
    rebuild_neighborhoods: bool = True
    upper_wall: tuple[float, ...] = DEFAULT_UPPER
    lower_wall: tuple[float, ...] = DEFAULT_LOWER
    x_domain: tuple[float, float] = (-60.0, 15.0)
    spawn_box: tuple[float, float, float, float] = (-58.0, -48.0, 36.0, 44.0)  # x0, x1, y0, y1
    target_model: str = "waypoints"
    target_position: tuple[float, float] = (14.0, 19.0)
    target_waypoints: tuple[tuple[float, float], ...] = field(default_factory=_default_waypoints)
    target_speed: float = 2.0
    neck_half_width: float | None = None

    def __post_init__(self):
        # normalise sequences so that parsed and constructed configs compare equal
        for name in ("upper_wall", "lower_wall", "x_domain", "spawn_box", "target_position"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "target_waypoints",
                           tuple(tuple(float(c) for c in p) for p in self.target_waypoints))
        validate(self)

    def motion_params(self) -> MotionParams:
        return MotionParams(lam=self.lam, gamma=self.gamma, eta=self.eta, d=self.d, dt=self.dt,
                            r=self.r, r_min=self.r_min, alpha=self.alpha,
                            alpha_max=self.alpha_max, l_s=self.l_s)

    def corridor(self) -> Corridor:
        return Corridor(WallFunction(self.upper_wall, "upper"),
                        WallFunction(self.lower_wall, "lower"), self.x_domain)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        return emit_config(self)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _fail(msg, key=None):
    raise ConfigError(msg, key=key)


def validate(cfg: ScenarioConfig):
    ints = ("n_agents", "iterations", "seed")
    for name in ints:
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            _fail(f"expected an integer, got {v!r}", name)
    if cfg.n_agents < 1:
        _fail("at least one agent is required", "n_agents")
    if cfg.iterations < 0:
        _fail("must be non-negative", "iterations")
    if not 0 <= cfg.seed < 2 ** 64:
        _fail("must be a 64-bit unsigned integer", "seed")
    for name in ("dt", "radius", "r", "r_min", "d", "l_s", "alpha", "alpha_max", "lam",
                 "gamma", "eta", "mu", "nu", "noise_std", "target_speed"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            _fail(f"expected a finite number, got {v!r}", name)
    for name in ("dt", "radius", "r", "r_min", "d", "l_s", "alpha", "alpha_max", "mu", "nu"):
        if not getattr(cfg, name) > 0:
            _fail("must be positive", name)
    for name in ("gamma", "eta", "noise_std", "target_speed"):
        if getattr(cfg, name) < 0:
            _fail("must be non-negative", name)
    if not 0 <= cfg.lam <= 1:
        _fail("must lie in [0, 1]", "lam")
    if cfg.nu > 1:
        _fail("must lie in (0, 1]", "nu")
    if cfg.r_min > cfg.r:
        _fail(f"r_min ({cfg.r_min}) must not exceed r ({cfg.r})", "r_min/r")
    if cfg.alpha > cfg.alpha_max:
        _fail(f"alpha ({cfg.alpha}) must not exceed alpha_max ({cfg.alpha_max})",
              "alpha/alpha_max")
    for name in ("avid_enabled", "rebuild_neighborhoods"):
        if not isinstance(getattr(cfg, name), bool):
            _fail("expected true or false", name)
    if cfg.target_model not in TARGET_MODELS:
        _fail(f"must be one of {TARGET_MODELS}", "target_model")
    if len(cfg.x_domain) != 2:
        _fail("expected [x_min, x_max]", "x_domain")
    if len(cfg.spawn_box) != 4:
        _fail("expected [x0, x1, y0, y1]", "spawn_box")
    if len(cfg.target_position) != 2:
        _fail("expected [x, y]", "target_position")
    if not cfg.target_waypoints or any(len(p) != 2 for p in cfg.target_waypoints):
        _fail("expected a non-empty list of [x, y] pairs", "target_waypoints")
    if cfg.neck_half_width is not None and not cfg.neck_half_width >= 0:
        _fail("must be non-negative", "neck_half_width")
    try:
        corridor = cfg.corridor()
    except InputError as exc:
        _fail(str(exc), "upper_wall/lower_wall/x_domain")
    x0, x1, y0, y1 = cfg.spawn_box
    if not (x0 < x1 and y0 < y1):
        _fail("box must have x0 < x1 and y0 < y1", "spawn_box")
    xs = np.linspace(x0, x1, 257)
    lo, hi = corridor.x_domain
    if x0 <= lo or x1 >= hi or any(corridor.lower(x) >= y0 or corridor.upper(x) <= y1 for x in xs):
        _fail("spawn box must lie strictly inside the corridor", "spawn_box")


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return "[" + ", ".join(_format_value(x) for x in v) + "]"
    return repr(v)


def emit_config(cfg: ScenarioConfig) -> str:
    lines = [f"{f.name} = {_format_value(getattr(cfg, f.name))}" for f in fields(cfg)]
    return "\n".join(lines) + "\n"


def _to_tuple(v):
    if isinstance(v, list):
        return tuple(_to_tuple(x) for x in v)
    return v


def _parse_value(raw: str, key: str, line: int):
    if raw == "none":
        return None
    try:
        v = json.loads(raw)
    except json.JSONDecodeError:
        if raw and all(ch.isalnum() or ch in "_-" for ch in raw):
            return raw  # bare word
        raise ConfigError(f"cannot parse value {raw!r}", key=key, line=line) from None
    return _to_tuple(v)


def _coerce(key, value, line):
    typ = FIELD_TYPES[key]
    if typ == "float" and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if typ == "float | None" and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if typ.startswith("tuple") and not isinstance(value, tuple):
        raise ConfigError(f"expected an array, got {value!r}", key=key, line=line)
    if typ == "int" and isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def parse_config_text(text: str, source: str = "<string>") -> ScenarioConfig:
    values, lines = {}, {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        body = raw_line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value' in {source}", line=lineno)
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in FIELD_TYPES:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        values[key] = _coerce(key, _parse_value(raw, key, lineno), lineno)
        lines[key] = lineno
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        line = None
        if exc.key is not None:
            hits = [lines[k] for k in exc.key.split("/") if k in lines]
            line = min(hits) if hits else None
        raise ConfigError(exc.message, key=exc.key, line=line) from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config_text(text, source=str(path))
