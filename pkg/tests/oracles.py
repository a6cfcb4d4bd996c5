"""Slow, independent reference computations used to check the fast paths."""
import numpy as np
from scipy.optimize import least_squares


def sampled_nearest(corridor, point, samples=1_000_000):
    """Closest wall point by brute-force sampling both walls."""
    lo, hi = corridor.x_domain
    xs = np.linspace(lo, hi, samples // 2)
    best = None
    for wall in (corridor.upper, corridor.lower):
        ys = np.polynomial.polynomial.polyval(xs, wall.coeffs)
        d = np.hypot(xs - point[0], ys - point[1])
        j = int(np.argmin(d))
        if best is None or d[j] < best[1]:
            best = (np.array([xs[j], ys[j]]), float(d[j]), wall.orientation)
    return best


def _wall_distance(wall, c, window):
    """Distance from centre ``c`` to a wall: coarse sampling, then Newton on
    the stationarity condition of the squared distance."""
    poly = np.polynomial.Polynomial(wall.coeffs)
    d1, d2 = poly.deriv(), poly.deriv(2)
    xs = np.linspace(c[0] - window, c[0] + window, 801)
    x = xs[int(np.argmin(np.hypot(xs - c[0], poly(xs) - c[1])))]
    for _ in range(50):
        g = (x - c[0]) + (poly(x) - c[1]) * d1(x)
        dg = 1 + d1(x) ** 2 + (poly(x) - c[1]) * d2(x)
        step = g / dg
        x -= step
        if abs(step) < 1e-15:
            break
    return float(np.hypot(x - c[0], poly(x) - c[1])), np.array([x, poly(x)])


def _residuals(corridor, agent, c, window):
    du, tu = _wall_distance(corridor.upper, c, window)
    dl, tl = _wall_distance(corridor.lower, c, window)
    chord = tu - tl
    n = np.hypot(*chord)
    incidence = (chord[0] * (agent[1] - tl[1]) - chord[1] * (agent[0] - tl[0])) / n
    return np.array([du - dl, incidence]), du, dl, tu, tl


def grid_tangent_chord(corridor, agent, grid=15):
    """Tangent-chord width by searching over circle centres.

    A centre is valid when it is equidistant from both walls and the agent
    lies on the chord joining the two closest wall points. Coarse grid over
    centres around the agent, then least-squares refinement.
    """
    agent = np.asarray(agent, dtype=float)
    gap = corridor.upper(agent[0]) - corridor.lower(agent[0])
    window = 3.0 * gap + 5.0
    best, best_c = np.inf, None
    for cx in np.linspace(agent[0] - gap, agent[0] + gap, grid):
        for cy in np.linspace(agent[1] - gap, agent[1] + gap, grid):
            if not corridor.lower(cx) < cy < corridor.upper(cx):
                continue
            r, *_ = _residuals(corridor, agent, (cx, cy), window)
            score = float(r @ r)
            if score < best:
                best, best_c = score, np.array([cx, cy])
    sol = least_squares(lambda c: _residuals(corridor, agent, c, window)[0], best_c,
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, diff_step=1e-7)
    r, du, dl, tu, tl = _residuals(corridor, agent, sol.x, window)
    return {"width": float(np.hypot(*(tu - tl))), "center": sol.x, "radius": 0.5 * (du + dl),
            "residual": float(np.max(np.abs(r))), "tangent_upper": tu, "tangent_lower": tl}


def dense_width_profile(corridor, samples=2001):
    """Vertical gap and mid-curve points sampled over the domain."""
    lo, hi = corridor.x_domain
    xs = np.linspace(lo, hi, samples)
    return xs, np.array([corridor.upper(x) - corridor.lower(x) for x in xs])
