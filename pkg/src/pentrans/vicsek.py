"""Vicsek self-propelled particles in a periodic square box.

Each step every particle takes the heading of the summed unit velocities of
all particles within ``r_int`` (itself included), plus ``eta * xi`` with
``xi`` uniform on an interval of width ``noise_span`` centred at 0. A span of
1 is the textbook ``xi ~ U[-1/2, 1/2]``; the default span 2 pi reads eta as a
fraction of the full circle, which is what puts the order-disorder crossover
inside eta in [0.05, 0.5]. Positions advance along the heading of the previous
step (``update="backward"``, the default) or along the fresh
heading (``update="forward"``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

TWO_PI = 2 * np.pi


def _wrap(x: np.ndarray, period: float) -> np.ndarray:
    x = np.mod(x, period)
    x[x >= period] -= period
    return x


@dataclass(frozen=True)
class VicsekConfig:
    n: int = 300
    box: float = 15.0
    v0: float = 0.5
    r_int: float = 1.0
    eta: float = 0.1
    dt: float = 1.0
    steps: int = 200
    seed: int = 0
    update: str = "backward"
    noise_span: float = TWO_PI

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one particle")
        if not self.box > 0 or not self.r_int > 0 or not self.dt > 0:
            raise ValueError("box, r_int and dt must be positive")
        if self.r_int > self.box / 2:
            raise ValueError("r_int must not exceed box / 2 (minimum-image convention)")
        if self.v0 < 0 or self.eta < 0 or not self.noise_span > 0:
            raise ValueError("v0 and eta must be >= 0, noise_span > 0")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.update not in ("backward", "forward"):
            raise ValueError(f"update must be 'backward' or 'forward', got {self.update!r}")


@dataclass(frozen=True)
class VicsekState:
    positions: np.ndarray  # (n, 2) in [0, box)
    orientations: np.ndarray  # (n,) radians in [0, 2 pi)

    @classmethod
    def random(cls, config: VicsekConfig, rng) -> "VicsekState":
        pos = _wrap(rng.uniform(0.0, config.box, (config.n, 2)), config.box)
        theta = _wrap(rng.uniform(0.0, TWO_PI, config.n), TWO_PI)
        return cls(pos, theta)


@dataclass(frozen=True)
class VicsekTrajectory:
    times: np.ndarray
    positions: np.ndarray  # (n_times, n, 2)
    orientations: np.ndarray  # (n_times, n)
    psi: np.ndarray

    def state(self, index: int) -> VicsekState:
        return VicsekState(self.positions[index], self.orientations[index])


def neighbor_mask(positions: np.ndarray, box: float, r_int: float) -> np.ndarray:
    """Minimum-image pairwise test ``|r_j - r_i| < r_int``; the diagonal is set."""
    delta = positions[None, :, :] - positions[:, None, :]
    delta -= box * np.round(delta / box)
    dist2 = np.einsum("ijk,ijk->ij", delta, delta)
    return dist2 < r_int * r_int


def step(state: VicsekState, config: VicsekConfig, noise_draw) -> VicsekState:
    """One synchronous update; ``noise_draw`` holds the xi values in [-1/2, 1/2]."""
    noise_draw = np.asarray(noise_draw, dtype=float)
    theta = state.orientations
    if noise_draw.shape != theta.shape:
        raise ValueError(f"noise_draw needs shape {theta.shape}, got {noise_draw.shape}")
    adj = neighbor_mask(state.positions, config.box, config.r_int)
    sx = adj @ np.cos(theta)
    sy = adj @ np.sin(theta)
    mean_dir = np.where((sx == 0) & (sy == 0), theta, np.arctan2(sy, sx))
    new_theta = _wrap(mean_dir + config.eta * config.noise_span * noise_draw, TWO_PI)
    heading = theta if config.update == "backward" else new_theta
    disp = config.v0 * config.dt * np.stack([np.cos(heading), np.sin(heading)], axis=1)
    new_pos = _wrap(state.positions + disp, config.box)
    return VicsekState(new_pos, new_theta)


def polarization(orientations) -> np.ndarray | float:
    """psi = |mean unit heading| in [0, 1]; works along the last axis."""
    theta = np.asarray(orientations, dtype=float)
    n = theta.shape[-1]
    psi = np.sqrt(np.cos(theta).sum(-1) ** 2 + np.sin(theta).sum(-1) ** 2) / n
    psi = np.minimum(psi, 1.0)
    return float(psi) if np.ndim(psi) == 0 else psi


def orientation_distance(orientations) -> np.ndarray:
    """``1 - |cos(theta_i - theta_j)|``; anti-aligned pairs sit at distance 0."""
    theta = np.asarray(orientations, dtype=float)
    d = 1.0 - np.abs(np.cos(theta[:, None] - theta[None, :]))
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 1.0)


def velocity_distance(orientations, v0: float) -> np.ndarray:
    theta = np.asarray(orientations, dtype=float)
    v = v0 * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if len(v) == 1:
        return np.zeros((1, 1))
    return squareform(pdist(v))


def simulate(config: VicsekConfig, initial: VicsekState | None = None) -> VicsekTrajectory:
    """Run ``config.steps`` steps; deterministic given ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    state = initial if initial is not None else VicsekState.random(config, rng)
    n_t = config.steps + 1
    positions = np.empty((n_t, config.n, 2))
    orientations = np.empty((n_t, config.n))
    positions[0], orientations[0] = state.positions, state.orientations
    for t in range(1, n_t):
        xi = rng.uniform(-0.5, 0.5, config.n)
        state = step(state, config, xi)
        positions[t], orientations[t] = state.positions, state.orientations
    times = np.arange(n_t) * config.dt
    return VicsekTrajectory(times, positions, orientations, polarization(orientations))
