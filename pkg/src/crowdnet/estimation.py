"""Diffusion adaptation (adapt-then-combine) over a mobile agent network.

Agents jointly estimate the target location ``w`` and the velocity of the
group centroid ``v^g``. Every agent first adapts its own estimate from a
local measurement and then averages the intermediate estimates of its
neighbours. Positions and estimates are stored as ``(N, 2)`` float arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometryError, InputError


@dataclass(frozen=True)
class Neighborhood:
    agent_id: int
    members: tuple[int, ...]  # sorted, contains agent_id

    def __len__(self):
        return len(self.members)

    def others(self) -> tuple[int, ...]:
        return tuple(m for m in self.members if m != self.agent_id)


@dataclass(frozen=True)
class CombinationWeights:
    """Column-stochastic combination matrix.

    ``matrix[l, k]`` is the weight agent ``k`` gives to the intermediate
    estimate of agent ``l``; every column sums to one.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"combination matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_agents(self) -> int:
        return self.matrix.shape[0]

    def weight(self, l: int, k: int) -> float:
        return float(self.matrix[l, k])

    def check(self, neighborhoods: Sequence[Neighborhood] | None = None, tol: float = 1e-12):
        """Raise InputError unless the convexity constraints hold."""
        m = self.matrix
        if np.any(m < 0):
            raise InputError("combination weights must be non-negative")
        sums = m.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > tol):
            k = int(np.argmax(np.abs(sums - 1.0)))
            raise InputError(f"weights of agent {k} sum to {sums[k]!r}, not 1")
        if neighborhoods is not None:
            if len(neighborhoods) != self.n_agents:
                raise InputError("weights and neighborhoods disagree on the number of agents")
            mask = np.zeros_like(m, dtype=bool)
            for nb in neighborhoods:
                mask[list(nb.members), nb.agent_id] = True
            if np.any(m[~mask] != 0.0):
                raise InputError("non-zero weight outside a neighborhood")


@dataclass(frozen=True)
class TargetMeasurement:
    distance: float
    direction: np.ndarray  # unit vector from the agent towards the target


def _as_points(positions) -> np.ndarray:
    pts = np.asarray(positions, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InputError(f"expected an (N, 2) array of positions, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InputError("positions must be finite")
    return pts


def build_neighborhoods(positions, radius: float) -> list[Neighborhood]:
    """Closed-ball neighbourhoods: l is a neighbour of k iff ||x_l - x_k|| <= radius."""
    if not radius > 0:
        raise InputError(f"neighborhood radius must be positive, got {radius}")
    pts = _as_points(positions)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    adjacent = dist <= radius
    return [Neighborhood(k, tuple(int(l) for l in np.flatnonzero(adjacent[k])))
            for k in range(len(pts))]


def uniform_combination_weights(neighborhoods: Sequence[Neighborhood]) -> CombinationWeights:
    n = len(neighborhoods)
    m = np.zeros((n, n))
    for nb in neighborhoods:
        m[list(nb.members), nb.agent_id] = 1.0 / len(nb.members)
    return CombinationWeights(m)


def lms_adapt(w_prev, d, u, mu: float) -> np.ndarray:
    """One LMS adaptation ``w + mu * u^* (d - u w)`` for a row regressor ``u``."""
    if not mu > 0:
        raise InputError(f"step size must be positive, got {mu}")
    w_prev = np.asarray(w_prev)
    u = np.atleast_1d(np.asarray(u))
    if u.shape != w_prev.shape:
        raise InputError(f"regressor shape {u.shape} does not match estimate shape {w_prev.shape}")
    residual = d - u @ w_prev
    return w_prev + mu * np.conj(u) * residual


def atc_lms_step(w_prev, d, regressors, mu, weights: CombinationWeights) -> np.ndarray:
    """Network-wide adapt-then-combine LMS update.

    Parameters
    ----------
    w_prev : (N, M) array
        Current estimates, one row per node.
    d : (N,) array
        Scalar measurements ``d_k(i)``.
    regressors : (N, M) array
        Row regressors ``u_{k,i}``.
    mu : float or (N,) array
        Per-node step sizes.
    weights : CombinationWeights
        ``a_{lk}`` with columns summing to one.

    Returns
    -------
    (N, M) array of combined estimates ``w_{k,i}``.
    """
    w_prev = np.atleast_2d(np.asarray(w_prev))
    regressors = np.atleast_2d(np.asarray(regressors))
    d = np.atleast_1d(np.asarray(d))
    n = w_prev.shape[0]
    if regressors.shape != w_prev.shape or d.shape != (n,):
        raise InputError("dimension mismatch between estimates, regressors and measurements")
    if weights.n_agents != n:
        raise InputError(f"weights cover {weights.n_agents} nodes, estimates cover {n}")
    mu = np.broadcast_to(np.asarray(mu, dtype=float), (n,))
    psi = np.stack([lms_adapt(w_prev[k], d[k], regressors[k], mu[k]) for k in range(n)])
    return weights.matrix.T @ psi


def measure_target(target, position, noise_std: float, rng: np.random.Generator | None = None
                   ) -> TargetMeasurement:
    """Range and bearing from ``position`` to ``target``; Gaussian noise on the range only."""
    offset = np.asarray(target, dtype=float) - np.asarray(position, dtype=float)
    dist = float(np.hypot(offset[0], offset[1]))
    if dist <= 1e-9:
        raise DegenerateGeometryError("agent coincides with the target")
    noise = 0.0
    if noise_std > 0:
        if rng is None:
            raise InputError("a random generator is required when noise_std > 0")
        noise = float(rng.normal(0.0, noise_std))
    elif noise_std < 0:
        raise InputError(f"noise_std must be non-negative, got {noise_std}")
    return TargetMeasurement(max(dist + noise, 0.0), offset / dist)


def adapt_target(w_prev, position, measurement: TargetMeasurement, mu: float) -> np.ndarray:
    """Intermediate target estimate psi.

    The range measurement is linear in the target: ``d = p (w - x)``, so
    the residual at ``w_prev`` is ``d + p (x - w_prev)``.
    """
    if not mu > 0:
        raise InputError(f"step size must be positive, got {mu}")
    w_prev = np.asarray(w_prev, dtype=float)
    p = measurement.direction
    residual = measurement.distance + p @ (np.asarray(position, dtype=float) - w_prev)
    psi = w_prev + mu * p * residual
    if not np.all(np.isfinite(psi)):
        raise InputError("non-finite target estimate")
    return psi


def adapt_group_velocity(vg_prev, velocity, nu: float) -> np.ndarray:
    if not 0 < nu <= 1:
        raise InputError(f"nu must lie in (0, 1], got {nu}")
    vg_prev = np.asarray(vg_prev, dtype=float)
    return vg_prev + nu * (np.asarray(velocity, dtype=float) - vg_prev)


def combine_estimates(psi, phi, weights_w: CombinationWeights,
                      weights_v: CombinationWeights | None = None):
    """Combine intermediates over each neighbourhood; returns ``(w, v_g)``."""
    psi = _as_points(psi)
    phi = _as_points(phi)
    if weights_v is None:
        weights_v = weights_w
    n = psi.shape[0]
    if phi.shape[0] != n or weights_w.n_agents != n or weights_v.n_agents != n:
        raise InputError("weights and intermediates disagree on the number of agents")
    return weights_w.matrix.T @ psi, weights_v.matrix.T @ phi
