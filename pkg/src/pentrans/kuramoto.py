"""Kuramoto oscillators on a random network.

    dtheta_i/dt = omega_i + (K / N) * sum_j G_ij sin(theta_j - theta_i)

integrated with fixed-step RK4. Phases are integrated unwrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * np.pi


def n_samples(t_max: float, dt: float) -> int:
    return int(math.floor(t_max / dt + 1e-9)) + 1


def random_adjacency(n: int, edge_prob: float, seed=None) -> np.ndarray:
    """Symmetric 0/1 matrix, zero diagonal, upper entries i.i.d. Bernoulli(edge_prob)."""
    if n < 1:
        raise ValueError("need at least one node")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < edge_prob, k=1)
    return (upper | upper.T).astype(float)


@dataclass(frozen=True)
class KuramotoConfig:
    coupling: float
    adjacency: np.ndarray
    omega: np.ndarray
    theta0: np.ndarray
    t_max: float = 10.0
    dt: float = 0.02

    def __post_init__(self):
        g = np.asarray(self.adjacency, dtype=float)
        n = len(g)
        if g.shape != (n, n):
            raise ValueError("adjacency must be square")
        if np.any(np.diag(g) != 0) or not np.array_equal(g, g.T) or not np.isin(g, (0.0, 1.0)).all():
            raise ValueError("adjacency must be symmetric 0/1 with zero diagonal")
        if np.shape(self.omega) != (n,) or np.shape(self.theta0) != (n,):
            raise ValueError("omega and theta0 need one entry per oscillator")
        if self.coupling < 0:
            raise ValueError("coupling must be >= 0")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.t_max > 0:
            raise ValueError("t_max must be > 0")

    @property
    def n(self) -> int:
        return len(self.omega)

    @classmethod
    def random(cls, n: int, coupling: float, seed=None, edge_prob: float = 0.78,
               t_max: float = 10.0, dt: float = 0.02) -> "KuramotoConfig":
        """Draw network, standard-normal frequencies and uniform phases from one stream."""
        rng = np.random.default_rng(seed)
        g = random_adjacency(n, edge_prob, rng)
        omega = rng.standard_normal(n)
        theta0 = rng.uniform(0.0, TWO_PI, n)
        return cls(coupling, g, omega, theta0, t_max, dt)


@dataclass(frozen=True)
class PhaseTrajectory:
    times: np.ndarray
    phases: np.ndarray  # (n_times, n), unwrapped
    r: np.ndarray

    @property
    def wrapped_phases(self) -> np.ndarray:
        return np.mod(self.phases, TWO_PI)


def _rhs(theta, omega, g, k_over_n):
    s, c = np.sin(theta), np.cos(theta)
    return omega + k_over_n * (c * (g @ s) - s * (g @ c))


def integrate(config: KuramotoConfig) -> PhaseTrajectory:
    n_t = n_samples(config.t_max, config.dt)
    dt = config.dt
    g = np.asarray(config.adjacency, dtype=float)
    omega = np.asarray(config.omega, dtype=float)
    k_over_n = config.coupling / config.n
    theta = np.asarray(config.theta0, dtype=float).copy()
    phases = np.empty((n_t, config.n))
    phases[0] = theta
    for step in range(1, n_t):
        k1 = _rhs(theta, omega, g, k_over_n)
        k2 = _rhs(theta + 0.5 * dt * k1, omega, g, k_over_n)
        k3 = _rhs(theta + 0.5 * dt * k2, omega, g, k_over_n)
        k4 = _rhs(theta + dt * k3, omega, g, k_over_n)
        theta = theta + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        phases[step] = theta
    times = np.arange(n_t) * dt
    return PhaseTrajectory(times, phases, order_parameter(phases))


def order_parameter(phases) -> np.ndarray | float:
    """Degree of synchronicity r in [0, 1]; works along the last axis."""
    phases = np.asarray(phases, dtype=float)
    n = phases.shape[-1]
    r = np.sqrt(np.cos(phases).sum(-1) ** 2 + np.sin(phases).sum(-1) ** 2) / n
    r = np.minimum(r, 1.0)
    return float(r) if np.ndim(r) == 0 else r


def synchronicity_distance(phases) -> np.ndarray:
    """Distance ``1 - phi_ij`` with ``phi_ij = |cos(theta_i - theta_j)|``.

    A 2-d input of shape ``(w, n)`` averages phi over the ``w`` rows, which
    gives the trailing-window variant.
    """
    phases = np.atleast_2d(np.asarray(phases, dtype=float))
    diff = phases[:, :, None] - phases[:, None, :]
    phi = np.abs(np.cos(diff)).mean(axis=0)
    d = 1.0 - phi
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 1.0)
