"""Corridor geometry: polynomial walls, obstacle queries and tangent-chord widths."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import minimize_scalar

from .errors import DomainError, GeometryError, InputError

MAX_DEGREE = 4
# expanded forms of 0.008(x - 10)^2 + 20 and 0.008(x + 10)^2 + 14
DEFAULT_UPPER = (20.8, -0.16, 0.008)
DEFAULT_LOWER = (14.8, 0.16, 0.008)


class Region(enum.Enum):
    I = "I"      # free pursuit
    II = "II"    # closer than the tolerable distance to a wall
    III = "III"  # next move would leave the corridor


@dataclass(frozen=True)
class WallFunction:
    """Wall ``y = c0 + c1 x + c2 x^2 + ...`` (ascending coefficients)."""

    coeffs: tuple[float, ...]
    orientation: str  # "upper" or "lower"

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not 1 <= len(coeffs) <= MAX_DEGREE + 1:
            raise InputError(f"wall polynomial must have 1..{MAX_DEGREE + 1} coefficients")
        if not all(math.isfinite(c) for c in coeffs):
            raise InputError("wall coefficients must be finite")
        if self.orientation not in ("upper", "lower"):
            raise InputError(f"orientation must be 'upper' or 'lower', got {self.orientation!r}")
        object.__setattr__(self, "coeffs", coeffs)
        d1 = tuple(k * c for k, c in enumerate(coeffs))[1:] or (0.0,)
        d2 = tuple(k * c for k, c in enumerate(d1))[1:] or (0.0,)
        object.__setattr__(self, "_d1", d1)
        object.__setattr__(self, "_d2", d2)

    @staticmethod
    def _horner(coeffs, x):
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def __call__(self, x: float) -> float:
        return self._horner(self.coeffs, x)

    def slope(self, x: float) -> float:
        return self._horner(self._d1, x)

    def curvature_term(self, x: float) -> float:
        """Second derivative f''(x)."""
        return self._horner(self._d2, x)

    @classmethod
    def from_vertex_form(cls, a, h, k, orientation):
        """``y = a (x - h)^2 + k``."""
        return cls((a * h * h + k, -2.0 * a * h, a), orientation)


def default_walls() -> tuple[WallFunction, WallFunction]:
    """The default funnel: upper 0.008(x-10)^2 + 20, lower 0.008(x+10)^2 + 14."""
    return (WallFunction(DEFAULT_UPPER, "upper"), WallFunction(DEFAULT_LOWER, "lower"))


@dataclass(frozen=True)
class NearestPoint:
    point: np.ndarray
    distance: float
    wall: str


@dataclass(frozen=True)
class TangentChordResult:
    width: float
    center: np.ndarray
    radius: float
    tangent_upper: np.ndarray
    tangent_lower: np.ndarray
    fallback_used: bool
    iterations: int = 0


@dataclass(frozen=True)
class Corridor:
    upper: WallFunction
    lower: WallFunction
    x_domain: tuple[float, float]

    def __post_init__(self):
        lo, hi = (float(v) for v in self.x_domain)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise InputError(f"invalid x-domain {self.x_domain}")
        object.__setattr__(self, "x_domain", (lo, hi))
        if self.upper.orientation != "upper" or self.lower.orientation != "lower":
            raise InputError("corridor needs one upper and one lower wall")
        if self.min_gap() <= 0:
            raise InputError("upper wall must lie strictly above the lower wall on the whole domain")

    def gap_coeffs(self) -> np.ndarray:
        return P.polysub(self.upper.coeffs, self.lower.coeffs)

    def min_gap(self) -> float:
        lo, hi = self.x_domain
        gap = self.gap_coeffs()
        xs = [lo, hi]
        if len(gap) > 2:
            for root in P.polyroots(P.polyder(gap)):
                if abs(root.imag) < 1e-12 and lo < root.real < hi:
                    xs.append(root.real)
        return float(min(P.polyval(x, gap) for x in xs))

    def in_domain(self, x: float) -> bool:
        lo, hi = self.x_domain
        return lo <= x <= hi

    def contains(self, point, strict: bool = False) -> bool:
        x, y = float(point[0]), float(point[1])
        if not self.in_domain(x):
            return False
        if strict:
            return self.lower(x) < y < self.upper(x)
        return self.lower(x) <= y <= self.upper(x)

    def mid_y(self, x: float) -> float:
        return 0.5 * (self.upper(x) + self.lower(x))

    def wall(self, which: str) -> WallFunction:
        if which == "upper":
            return self.upper
        if which == "lower":
            return self.lower
        raise InputError(f"unknown wall {which!r}")


def wall_eval(corridor: Corridor, which: str, x: float) -> tuple[float, float]:
    """Value and slope of one wall, restricted to the corridor's x-domain."""
    if not corridor.in_domain(x):
        raise DomainError(f"x={x} outside domain {corridor.x_domain}")
    wall = corridor.wall(which)
    return wall(x), wall.slope(x)


def _require_inside(corridor: Corridor, point):
    if not corridor.contains(point, strict=True):
        raise GeometryError(f"point {tuple(np.asarray(point, float))} is not inside the corridor")


def _nearest_on_wall(wall: WallFunction, lo: float, hi: float, px: float, py: float):
    # stationary points of (x - px)^2 + (f(x) - py)^2 solve (x - px) + (f(x) - py) f'(x) = 0
    c = np.asarray(wall.coeffs)
    shifted = c.copy()
    shifted[0] -= py
    g = P.polyadd(P.polymul(shifted, P.polyder(c)) if len(c) > 1 else [0.0], [-px, 1.0])
    candidates = [lo, hi]
    for root in P.polyroots(g):
        if abs(root.imag) < 1e-9 * max(1.0, abs(root.real)) and lo < root.real < hi:
            candidates.append(root.real)
    best = None
    for x in candidates:
        # polish with Newton on the stationarity condition
        for _ in range(3):
            if not lo < x < hi:
                break
            fx, f1, f2 = wall(x), wall.slope(x), wall.curvature_term(x)
            gx = (x - px) + (fx - py) * f1
            dg = 1.0 + f1 * f1 + (fx - py) * f2
            if dg == 0:
                break
            x = min(max(x - gx / dg, lo), hi)
        dist = math.hypot(x - px, wall(x) - py)
        if best is None or dist < best[1]:
            best = (x, dist)
    return best


def nearest_obstacle_point(corridor: Corridor, position) -> NearestPoint:
    """Closest point to ``position`` on either wall over the x-domain."""
    _require_inside(corridor, position)
    px, py = float(position[0]), float(position[1])
    lo, hi = corridor.x_domain
    xu, du = _nearest_on_wall(corridor.upper, lo, hi, px, py)
    xl, dl = _nearest_on_wall(corridor.lower, lo, hi, px, py)
    if dl <= du:
        return NearestPoint(np.array([xl, corridor.lower(xl)]), dl, "lower")
    return NearestPoint(np.array([xu, corridor.upper(xu)]), du, "upper")


def classify_region(corridor: Corridor, position, candidate, d: float,
                    wall_distance: float | None = None) -> Region:
    """Region III if ``candidate`` leaves the closed corridor, else II if the
    current wall distance is below ``d``, else I.

    ``wall_distance`` may be passed when the caller already knows it.
    """
    if not d > 0:
        raise InputError(f"tolerable distance must be positive, got {d}")
    _require_inside(corridor, position)
    if not corridor.contains(candidate):
        return Region.III
    if wall_distance is None:
        wall_distance = nearest_obstacle_point(corridor, position).distance
    return Region.II if wall_distance < d else Region.I


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _tc_residual(upper, lower, tu, tl, px, py):
    g, h = upper.slope(tu), lower.slope(tl)
    su, sl = math.sqrt(1 + g * g), math.sqrt(1 + h * h)
    pux, puy = tu, upper(tu)
    plx, ply = tl, lower(tl)
    # inward normals: downward from the upper wall, upward from the lower one
    nux, nuy = g / su, -1.0 / su
    nlx, nly = -h / sl, 1.0 / sl
    dx, dy = pux - plx, puy - ply
    ex, ey = nlx - nux, nly - nuy
    f1 = _cross(dx, dy, ex, ey)
    qx, qy = px - pux, py - puy
    f2 = -_cross(dx, dy, qx, qy)

    g2, h2 = upper.curvature_term(tu), lower.curvature_term(tl)
    # d/dtu of the upper point, normal and the difference vectors
    dpu = (1.0, g)
    dnu = (g2 / su ** 3, g2 * g / su ** 3)
    dpl = (1.0, h)
    dnl = (-h2 / sl ** 3, -h2 * h / sl ** 3)
    j11 = _cross(dpu[0], dpu[1], ex, ey) + _cross(dx, dy, -dnu[0], -dnu[1])
    j12 = _cross(-dpl[0], -dpl[1], ex, ey) + _cross(dx, dy, dnl[0], dnl[1])
    j21 = -(_cross(dpu[0], dpu[1], qx, qy) + _cross(dx, dy, -dpu[0], -dpu[1]))
    j22 = -_cross(-dpl[0], -dpl[1], qx, qy)
    return (f1, f2), ((j11, j12), (j21, j22)), (dx, dy, ex, ey, nux, nuy)


def solve_tangent_chord(corridor: Corridor, position, max_iter: int = 100, tol: float = 1e-12):
    """Damped Newton on the tangent-point abscissae ``(t_upper, t_lower)``.

    Returns ``(t_upper, t_lower, iterations)`` or None if it did not converge.
    """
    px, py = float(position[0]), float(position[1])
    up, low = corridor.upper, corridor.lower
    scale = max(1.0, corridor.upper(px) - corridor.lower(px)) ** 2
    tu = tl = px
    (f1, f2), jac, _ = _tc_residual(up, low, tu, tl, px, py)
    norm = math.hypot(f1, f2)
    for it in range(1, max_iter + 1):
        (a, b), (c, e) = jac
        det = a * e - b * c
        if det == 0 or not math.isfinite(det):
            return None
        du = (e * f1 - b * f2) / det
        dl = (a * f2 - c * f1) / det
        step = 1.0
        while True:
            ntu, ntl = tu - step * du, tl - step * dl
            (g1, g2), njac, _ = _tc_residual(up, low, ntu, ntl, px, py)
            nnorm = math.hypot(g1, g2)
            if nnorm < norm or step < 1e-6:
                break
            step *= 0.5
        if not math.isfinite(nnorm):
            return None
        tu, tl, f1, f2, jac, norm = ntu, ntl, g1, g2, njac, nnorm
        if norm <= tol * scale and abs(step * du) + abs(step * dl) < 1e-9:
            return tu, tl, it
        if norm <= tol * scale * 1e-3:
            return tu, tl, it
    return None


def tangent_chord_width(corridor: Corridor, position, max_iter: int = 100) -> TangentChordResult:
    """Width of the corridor at ``position`` measured by the tangent chord.

    A circle inside the corridor touches both walls and the agent lies on the
    chord joining the two touching points; the chord length is the width.
    Falls back to the vertical gap if the solver fails.
    """
    _require_inside(corridor, position)
    px, py = float(position[0]), float(position[1])
    sol = solve_tangent_chord(corridor, position, max_iter=max_iter)
    if sol is not None:
        tu, tl, iterations = sol
        _, _, (dx, dy, ex, ey, nux, nuy) = _tc_residual(corridor.upper, corridor.lower,
                                                        tu, tl, px, py)
        radius = (dx * ex + dy * ey) / (ex * ex + ey * ey)
        tup = np.array([tu, corridor.upper(tu)])
        tlo = np.array([tl, corridor.lower(tl)])
        # agent must sit between the tangent points, not on the extended line
        t = ((px - tlo[0]) * dx + (py - tlo[1]) * dy) / (dx * dx + dy * dy)
        if radius > 0 and -1e-9 <= t <= 1 + 1e-9:
            center = tup + radius * np.array([nux, nuy])
            return TangentChordResult(math.hypot(dx, dy), center, radius, tup, tlo,
                                      False, iterations)
    gap = corridor.upper(px) - corridor.lower(px)
    return TangentChordResult(gap, np.array([px, corridor.mid_y(px)]), 0.5 * gap,
                              np.array([px, corridor.upper(px)]),
                              np.array([px, corridor.lower(px)]), True, max_iter)


def mid_curve_width(corridor: Corridor, x: float) -> float:
    return tangent_chord_width(corridor, (x, corridor.mid_y(x))).width


def neck_location(corridor: Corridor, resolution: float = 0.5) -> tuple[float, float]:
    """Abscissa and tangent-chord width of the narrowest point of the corridor.

    Widths are sampled along the mid-curve; ties go to the leftmost sample.
    """
    if not resolution > 0:
        raise InputError(f"resolution must be positive, got {resolution}")
    lo, hi = corridor.x_domain
    n = max(2, int(math.ceil((hi - lo) / resolution)) + 1)
    xs = np.linspace(lo, hi, n)
    widths = np.array([mid_curve_width(corridor, x) for x in xs])
    j = int(np.argmin(widths))
    best_x, best_w = float(xs[j]), float(widths[j])
    a, b = xs[max(j - 1, 0)], xs[min(j + 1, n - 1)]
    if widths[max(j - 1, 0)] > best_w or widths[min(j + 1, n - 1)] > best_w:
        res = minimize_scalar(lambda x: mid_curve_width(corridor, x), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-9})
        if res.fun < best_w - 1e-12:
            best_x, best_w = float(res.x), float(res.fun)
    return best_x, best_w
