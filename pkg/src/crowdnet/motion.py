"""Per-agent velocity construction, AVID adaptation and position integration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InputError
from .geometry import Corridor, Region


@dataclass(frozen=True)
class MotionParams:
    lam: float = 0.5          # weight of the pursuit/avoidance term
    gamma: float = 2.0        # weight of the spacing term
    eta: float = 2.0          # wall repulsion gain
    d: float = 2.0            # tolerable wall distance
    dt: float = 0.5
    r: float = 3.0            # standard desired spacing
    r_min: float = 2.0
    alpha: float = 2.0        # standard velocity weight
    alpha_max: float = 4.0
    l_s: float = 16.0         # standard corridor width

    def __post_init__(self):
        if not 0 <= self.lam <= 1:
            raise InputError(f"lam must lie in [0, 1], got {self.lam}")
        for name in ("gamma", "eta"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be non-negative")
        for name in ("d", "dt", "r", "r_min", "alpha", "alpha_max", "l_s"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.r_min > self.r:
            raise InputError(f"r_min ({self.r_min}) exceeds r ({self.r})")
        if self.alpha > self.alpha_max:
            raise InputError(f"alpha ({self.alpha}) exceeds alpha_max ({self.alpha_max})")


def _unit(v, what):
    n = math.hypot(v[0], v[1])
    if n <= 1e-9:
        raise DegenerateGeometryError(f"cannot normalise {what}: points coincide")
    return np.asarray(v, dtype=float) / n


def pursuit_avoidance_velocity(position, estimate, region: Region, nearest, params: MotionParams
                               ) -> np.ndarray:
    """Target pursuit in Region I, pursuit blended with wall repulsion in
    Region II, zero in Region III. ``nearest`` is the closest wall point."""
    if region is Region.III:
        return np.zeros(2)
    x = np.asarray(position, dtype=float)
    toward = _unit(np.asarray(estimate, dtype=float) - x, "target direction")
    if region is Region.I:
        return toward
    away = x - np.asarray(nearest, dtype=float)
    dist = math.hypot(away[0], away[1])
    away = _unit(away, "wall direction")
    return 0.5 * (toward + params.eta * (params.d - dist) * away)


def local_distance_term(position, neighbor_positions, r: float) -> np.ndarray:
    """Mean of ``(1 - r/||x_l - x_k||)(x_l - x_k)`` over the other members of
    the neighbourhood: repulsive below spacing ``r``, attractive above it."""
    others = np.asarray(neighbor_positions, dtype=float).reshape(-1, 2)
    if len(others) == 0:
        return np.zeros(2)
    diff = others - np.asarray(position, dtype=float)
    dist = np.hypot(diff[:, 0], diff[:, 1])
    if np.any(dist <= 1e-9):
        raise DegenerateGeometryError("two neighbouring agents share a position")
    return ((1.0 - r / dist)[:, None] * diff).mean(axis=0)


def avid_update(width: float, params: MotionParams) -> tuple[float, float]:
    """Desired spacing and velocity weight for local corridor width ``width``."""
    if not width > 0:
        raise InputError(f"corridor width must be positive, got {width}")
    if width < params.l_s:
        frac = width / params.l_s
        r = (1.0 - frac) * params.r_min + frac * params.r
        alpha = frac * params.alpha + (1.0 - frac) * params.alpha_max
        return r, alpha
    return params.r, params.alpha


def compose_velocity(v_a, v_g, delta, alpha_k: float, params: MotionParams) -> np.ndarray:
    return (params.lam * alpha_k * np.asarray(v_a, dtype=float)
            + (1.0 - params.lam) * np.asarray(v_g, dtype=float)
            + params.gamma * np.asarray(delta, dtype=float))


def integrate_position(position, velocity, corridor: Corridor, params: MotionParams):
    """Advance by ``dt * velocity`` if that stays inside the corridor.

    Returns ``(new_position, moved)``; a blocked agent keeps its position and
    the caller records its velocity as zero.
    """
    x = np.asarray(position, dtype=float)
    candidate = x + params.dt * np.asarray(velocity, dtype=float)
    # strict: later wall queries need an interior point
    if corridor.contains(candidate, strict=True):
        return candidate, True
    return x.copy(), False
