"""Parameter sweeps: simulate, track a topological statistic, estimate lambda_c.

Every (parameter, realization) task gets its own random stream, seeded from
``SeedSequence(master_seed, spawn_key=(parameter_index, realization))``, so
results never depend on execution order or on the number of workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import kuramoto, vicsek
from .stability import (
    STATISTICS,
    CriticalEstimate,
    StabilityRecord,
    StatisticSeries,
    distance_statistic,
    stability_probability,
    transition_time,
)

log = logging.getLogger(__name__)


class SweepError(RuntimeError):
    pass


@dataclass(frozen=True)
class Detector:
    """Settings shared by every sweep. ``window=None`` means 10% of the horizon."""

    window: Optional[float] = None
    tolerance: float = 0.05
    p0: float = 0.9
    stride: int = 1
    statistic: str = "npe_h0"
    tau: float = 0.0

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"statistic must be one of {STATISTICS}")
        if self.window is not None and not self.window > 0:
            raise ValueError("window must be > 0")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if not 0 < self.p0 < 1:
            raise ValueError("p0 must lie in (0, 1)")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    def window_for(self, horizon: float) -> float:
        return self.window if self.window is not None else 0.1 * horizon


@dataclass(frozen=True)
class KuramotoSweep:
    n: int = 50
    k_grid: tuple = (0.0, 1.0, 3.0, 5.0)
    t_max: float = 10.0
    dt: float = 0.02
    realizations: int = 10
    edge_prob: float = 0.78
    master_seed: int = 0
    phi_window: int = 1
    # Incoherent phases leave a handful of gap bars whose NPE jitters around
    # 0.05; cutting bars shorter than 0.02 keeps the K=0 series off the
    # plateau while the locked state still collapses onto the capped bar.
    detector: Detector = field(default_factory=lambda: Detector(window=1.0, tau=0.02))

    model = "kuramoto"
    direction = "inf_above"
    observable = "r"

    @property
    def grid(self) -> tuple:
        return tuple(float(k) for k in self.k_grid)

    @property
    def horizon(self) -> float:
        return (kuramoto.n_samples(self.t_max, self.dt) - 1) * self.dt


@dataclass(frozen=True)
class VicsekSweep:
    n: int = 300
    box: float = 15.0
    v0: float = 0.5
    r_int: float = 1.0
    eta_grid: tuple = (0.05, 0.1, 0.2, 0.3, 0.5)
    dt: float = 1.0
    steps: int = 200
    realizations: int = 10
    master_seed: int = 0
    distance_mode: str = "orientation"
    noise_span: float = 2 * math.pi
    update: str = "backward"
    detector: Detector = field(default_factory=Detector)

    model = "vicsek"
    direction = "sup_above"
    observable = "psi"

    def __post_init__(self):
        if self.distance_mode not in ("orientation", "velocity"):
            raise ValueError("distance_mode must be 'orientation' or 'velocity'")

    @property
    def grid(self) -> tuple:
        return tuple(float(e) for e in self.eta_grid)

    @property
    def horizon(self) -> float:
        return self.steps * self.dt

    def config(self, eta: float, seed: int) -> vicsek.VicsekConfig:
        return vicsek.VicsekConfig(
            n=self.n, box=self.box, v0=self.v0, r_int=self.r_int, eta=eta, dt=self.dt,
            steps=self.steps, seed=seed, update=self.update, noise_span=self.noise_span,
        )


@dataclass(frozen=True)
class ExternalSweep:
    """Precomputed distance matrices: ``groups[(lambda, run)] = [(time, matrix), ...]``."""

    groups: dict
    grid: tuple
    direction: str = "inf_above"
    detector: Detector = field(default_factory=Detector)

    model = "external"
    observable = None

    @property
    def realizations(self) -> int:
        runs = {r for (_, r) in self.groups}
        return len(runs)

    @property
    def horizon(self) -> float:
        return max(t for items in self.groups.values() for t, _ in items)


@dataclass(frozen=True)
class RealizationResult:
    parameter: float
    parameter_index: int
    realization: int
    series: StatisticSeries
    t_star: Optional[float]
    observable: Optional[np.ndarray] = None  # sampled r or psi, aligned with series.times


@dataclass(frozen=True)
class SweepResult:
    model: str
    estimate: CriticalEstimate
    results: tuple
    horizon: float
    window: float
    detector: Detector
    observable: Optional[str] = None

    @property
    def records(self) -> list:
        return [StabilityRecord(r.parameter, r.realization, r.t_star, self.horizon) for r in self.results]

    def for_parameter(self, lam: float) -> list:
        return [r for r in self.results if r.parameter == lam]


def derive_seed(master_seed: int, parameter_index: int, realization: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(parameter_index, realization))
    return int(ss.generate_state(1, np.uint64)[0])


def _sample_indices(n_times: int, stride: int) -> np.ndarray:
    return np.arange(0, n_times, stride)


def _statistic_series(times, matrices, det: Detector, context: str) -> np.ndarray:
    values = np.empty(len(times))
    for i, (t, d) in enumerate(zip(times, matrices)):
        try:
            values[i] = distance_statistic(d, det.statistic, det.tau)
        except Exception as exc:
            raise SweepError(f"{context}, t={t}: {exc}") from exc
    return values


def _run_kuramoto(cfg: KuramotoSweep, lam: float, seed: int, context: str):
    kcfg = kuramoto.KuramotoConfig.random(cfg.n, lam, seed, cfg.edge_prob, cfg.t_max, cfg.dt)
    traj = kuramoto.integrate(kcfg)
    idx = _sample_indices(len(traj.times), cfg.detector.stride)
    w = max(1, cfg.phi_window)
    mats = (kuramoto.synchronicity_distance(traj.phases[max(0, i - w + 1): i + 1]) for i in idx)
    times = traj.times[idx]
    return times, _statistic_series(times, mats, cfg.detector, context), traj.r[idx]


def _run_vicsek(cfg: VicsekSweep, lam: float, seed: int, context: str):
    traj = vicsek.simulate(cfg.config(lam, seed))
    idx = _sample_indices(len(traj.times), cfg.detector.stride)
    if cfg.distance_mode == "orientation":
        mats = (vicsek.orientation_distance(traj.orientations[i]) for i in idx)
    else:
        mats = (vicsek.velocity_distance(traj.orientations[i], cfg.v0) for i in idx)
    times = traj.times[idx]
    return times, _statistic_series(times, mats, cfg.detector, context), traj.psi[idx]


def _run_external(cfg: ExternalSweep, lam: float, run: int, context: str):
    items = cfg.groups[(lam, run)]
    times = np.array([t for t, _ in items], dtype=float)
    mats = (m for _, m in items)
    return times, _statistic_series(times, mats, cfg.detector, context), None


def _task(args):
    cfg, lam_index, lam, r = args
    context = f"{cfg.model}: lambda={lam}, r={r}"
    if cfg.model == "kuramoto":
        out = _run_kuramoto(cfg, lam, derive_seed(cfg.master_seed, lam_index, r), context)
    elif cfg.model == "vicsek":
        out = _run_vicsek(cfg, lam, derive_seed(cfg.master_seed, lam_index, r), context)
    else:
        out = _run_external(cfg, lam, r, context)
    times, values, obs = out
    series = StatisticSeries(times, values, cfg.detector.statistic)
    window = cfg.detector.window_for(cfg.horizon)
    try:
        t_star = transition_time(series, window, cfg.detector.tolerance)
    except ValueError as exc:
        raise SweepError(f"{context}: {exc}") from exc
    return RealizationResult(lam, lam_index, r, series, t_star, obs)


def _tasks(cfg):
    if cfg.model == "external":
        out = []
        for li, lam in enumerate(cfg.grid):
            runs = sorted(r for (l, r) in cfg.groups if l == lam)
            if not runs:
                raise SweepError(f"external: no samples for lambda={lam}")
            out.extend((cfg, li, lam, r) for r in runs)
        return out
    return [(cfg, li, lam, r) for li, lam in enumerate(cfg.grid) for r in range(cfg.realizations)]


def run_sweep(cfg, workers: int = 1) -> SweepResult:
    """Run every (parameter, realization) task and estimate the critical parameter."""
    tasks = _tasks(cfg)
    log.info("%s sweep: %d tasks", cfg.model, len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    results.sort(key=lambda r: (r.parameter_index, r.realization))
    horizon = cfg.horizon
    probs = []
    for lam in cfg.grid:
        recs = [StabilityRecord(r.parameter, r.realization, r.t_star, horizon) for r in results if r.parameter == lam]
        probs.append(stability_probability(recs))
    est = CriticalEstimate.from_probabilities(cfg.grid, probs, cfg.detector.p0, cfg.direction)
    return SweepResult(cfg.model, est, tuple(results), horizon, cfg.detector.window_for(horizon),
                       cfg.detector, cfg.observable)


# -- output tree ----------------------------------------------------------------

def _num(x) -> str:
    return "NA" if x is None else repr(float(x))


def series_filename(lam: float, realization: int) -> str:
    return f"{float(lam)!r}_{realization}.csv"


def write_sweep(result: SweepResult, outdir) -> Path:
    """Write ``p_lambda.csv``, ``t_star.csv``, ``estimate.txt``, ``series/`` and ``observables/``."""
    out = Path(outdir)
    (out / "series").mkdir(parents=True, exist_ok=True)
    est = result.estimate
    with open(out / "p_lambda.csv", "w") as fh:
        fh.write("lambda,p\n")
        for lam, p in zip(est.grid, est.probabilities):
            fh.write(f"{_num(lam)},{_num(p)}\n")
    with open(out / "t_star.csv", "w") as fh:
        fh.write("lambda,realization,t_star\n")
        for r in result.results:
            fh.write(f"{_num(r.parameter)},{r.realization},{_num(r.t_star)}\n")
    with open(out / "estimate.txt", "w") as fh:
        fh.write(f"lambda_c_hat={_num(est.lambda_c_hat)}\n")
        fh.write(f"direction={est.direction}\n")
        fh.write(f"p0={_num(est.p0)}\n")
        fh.write(f"window={_num(result.window)}\n")
        fh.write(f"tolerance={_num(result.detector.tolerance)}\n")
        fh.write(f"statistic={result.detector.statistic}\n")
        fh.write(f"tau={_num(result.detector.tau)}\n")
        fh.write(f"horizon={_num(result.horizon)}\n")
    for r in result.results:
        name = series_filename(r.parameter, r.realization)
        with open(out / "series" / name, "w") as fh:
            fh.write(f"t,{r.series.kind}\n")
            for t, v in zip(r.series.times, r.series.values):
                fh.write(f"{_num(t)},{_num(v)}\n")
        if r.observable is not None:
            (out / "observables").mkdir(exist_ok=True)
            with open(out / "observables" / name, "w") as fh:
                fh.write(f"t,{result.observable}\n")
                for t, v in zip(r.series.times, r.observable):
                    fh.write(f"{_num(t)},{_num(v)}\n")
    return out


def read_estimate(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def with_detector(cfg, **changes):
    return replace(cfg, detector=replace(cfg.detector, **changes))


def read_series(path) -> tuple[str, np.ndarray, np.ndarray]:
    """Read a two-column ``t,<name>`` CSV written by ``write_sweep``."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty series file")
    head = lines[0].split(",")
    if len(head) != 2 or head[0] != "t":
        raise ValueError(f"{path}: expected header 't,<name>'")
    t, v = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        try:
            t.append(float(parts[0]))
            v.append(math.nan if parts[1] == "NA" else float(parts[1]))
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: expected two numbers, got {ln!r}") from None
    return head[1], np.array(t), np.array(v)


def read_p_lambda(path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    rows = [ln.split(",") for ln in path.read_text().splitlines()[1:] if ln.strip()]
    try:
        return np.array([float(r[0]) for r in rows]), np.array([float(r[1]) for r in rows])
    except (ValueError, IndexError):
        raise ValueError(f"{path}: expected 'lambda,p' rows") from None
