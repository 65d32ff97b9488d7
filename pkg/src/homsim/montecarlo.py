"""Monte Carlo model of coincidence detection behind the beamsplitter.

Each pair gets an arrival-time difference x drawn from f+(x) + f-(x), a sum time
drawn from the pump envelope, and an outcome: split with probability
f-(x) / (f+(x) + f-(x)), otherwise bunched into a uniformly chosen channel.
Detectors are ideal except for additive Gaussian timing jitter.
"""
from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterator, Sequence

import numpy as np

from .spectral import Sign, SpectralParams, TimeGrid, density_f, total_probability

__all__ = [
    "Outcome", "DetectorConfig", "DetectionRun", "EventRecord", "EventTable", "RunSummary",
    "RunResult", "PairSampler", "DensityHistogram", "DipScanTable", "JITTER_MODEL",
    "splitmix64", "point_seed", "split_probability_given_x", "sample_pair", "simulate_run",
    "reconstruct_density", "dip_scan",
]

JITTER_MODEL = "additive independent Gaussian per detector"
CDF_STEP_PER_TAU_L = 1.0 / 100
_MASK64 = (1 << 64) - 1


class Outcome(IntEnum):
    SPLIT = 0
    BUNCHED_UP = 1
    BUNCHED_DOWN = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class DetectorConfig:
    temporal_resolution: float = 0.0  # s, std of each detector's jitter
    coincidence_window: float = 1e-9  # s, max |t_up - t_down| for a coincidence

    def __post_init__(self):
        if not (math.isfinite(self.temporal_resolution) and self.temporal_resolution >= 0):
            raise ValueError(f"temporal_resolution must be >= 0, got {self.temporal_resolution!r}")
        if not self.coincidence_window > 0:
            raise ValueError(f"coincidence_window must be > 0, got {self.coincidence_window!r}")


@dataclass(frozen=True)
class DetectionRun:
    n_pairs: int
    seed: int
    params: SpectralParams
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def __post_init__(self):
        if int(self.n_pairs) != self.n_pairs or self.n_pairs <= 0:
            raise ValueError(f"n_pairs must be a positive integer, got {self.n_pairs!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= _MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class EventRecord:
    pair_index: int
    outcome: Outcome
    t_up: float | None
    t_down: float | None


@dataclass(frozen=True, eq=False)
class EventTable:
    """Columnar event store; absent detection times are NaN."""

    pair_index: np.ndarray
    outcome: np.ndarray
    t_up: np.ndarray
    t_down: np.ndarray
    detector: DetectorConfig = field(default_factory=DetectorConfig)

    def __len__(self):
        return len(self.pair_index)

    def records(self) -> Iterator[EventRecord]:
        for i, o, tu, td in zip(self.pair_index, self.outcome, self.t_up, self.t_down):
            yield EventRecord(int(i), Outcome(int(o)),
                              None if np.isnan(tu) else float(tu),
                              None if np.isnan(td) else float(td))

    @property
    def split_mask(self) -> np.ndarray:
        return self.outcome == Outcome.SPLIT

    def split_time_differences(self) -> np.ndarray:
        m = self.split_mask
        return self.t_up[m] - self.t_down[m]


@dataclass(frozen=True)
class RunSummary:
    n_pairs: int
    n_split: int
    n_bunched_up: int
    n_bunched_down: int
    n_coincidences: int
    w_minus: float
    w_minus_stderr: float
    w_minus_analytic: float


@dataclass(frozen=True, eq=False)
class RunResult:
    events: EventTable
    summary: RunSummary


def split_probability_given_x(x, params: SpectralParams):
    """f-(x) / (f+(x) + f-(x)) = (1 - sech(x dt / 2 tau_L^2)) / 2, stable in the tails."""
    z = np.abs(np.asarray(x, dtype=float) * params.delta_t) / (2.0 * params.tau_L ** 2)
    e = np.exp(-z)
    return 0.5 * (1.0 - 2.0 * e / (1.0 + e * e))


class PairSampler:
    """Inverse-CDF sampler of pair arrival data for one parameter set.

    The CDF of f+ + f- is tabulated with spacing tau_L/100 over
    +-(|dt| + 12 tau_L) by trapezoid integration and inverted by linear
    interpolation.
    """

    def __init__(self, params: SpectralParams):
        self.params = params
        reach = abs(params.delta_t) + 12.0 * params.tau_L
        step = CDF_STEP_PER_TAU_L * params.tau_L
        n = 2 * int(math.ceil(reach / step)) + 1
        x = np.linspace(-reach, reach, n)
        dens = density_f(x, Sign.PLUS, params) + density_f(x, Sign.MINUS, params)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))])
        cdf /= cdf[-1]
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        self._x = x[keep]
        self._cdf = cdf[keep]

    def inverse_cdf(self, u):
        return np.interp(u, self._cdf, self._x)

    def draw(self, rng: np.random.Generator, n: int):
        """Draw ``n`` pairs: arrays (x, sum_time, outcome)."""
        p = self.params
        x = self.inverse_cdf(rng.random(n))
        sum_time = -p.delta_t + math.sqrt(2.0) * p.tau_p * rng.standard_normal(n)
        split = rng.random(n) < split_probability_given_x(x, p)
        up = rng.random(n) < 0.5
        outcome = np.where(split, Outcome.SPLIT, np.where(up, Outcome.BUNCHED_UP, Outcome.BUNCHED_DOWN))
        return x, sum_time, outcome.astype(np.int8)


@functools.lru_cache(maxsize=64)
def _sampler(params: SpectralParams) -> PairSampler:
    return PairSampler(params)


def sample_pair(params: SpectralParams, rng: np.random.Generator):
    """One pair: (x = t1 - t2, t1 + t2, Outcome)."""
    x, s, o = _sampler(params).draw(rng, 1)
    return float(x[0]), float(s[0]), Outcome(int(o[0]))


def simulate_run(run: DetectionRun) -> RunResult:
    """Simulate ``run.n_pairs`` pairs with detector jitter; deterministic in ``run``.

    Split pairs record photon 1 in the up detector and photon 2 in the down one
    (the split density is even in x, so the assignment is immaterial).  A
    bunched pair gives a single click at the earlier of the two arrivals.
    """
    if run.n_pairs <= 0:
        raise ValueError("n_pairs must be positive")
    rng = np.random.Generator(np.random.PCG64(run.seed))
    n = run.n_pairs
    x, s, outcome = _sampler(run.params).draw(rng, n)
    res = run.detector.temporal_resolution
    jitter_up = res * rng.standard_normal(n)
    jitter_down = res * rng.standard_normal(n)
    t1, t2 = (s + x) / 2, (s - x) / 2
    first = np.minimum(t1, t2)

    split = outcome == Outcome.SPLIT
    b_up = outcome == Outcome.BUNCHED_UP
    b_down = outcome == Outcome.BUNCHED_DOWN
    t_up = np.where(split, t1, np.where(b_up, first, np.nan)) + jitter_up
    t_down = np.where(split, t2, np.where(b_down, first, np.nan)) + jitter_down
    events = EventTable(np.arange(n, dtype=np.int64), outcome, t_up, t_down, run.detector)

    n_split = int(split.sum())
    w = n_split / n
    coinc = int(np.sum(np.abs(t_up[split] - t_down[split]) <= run.detector.coincidence_window))
    summary = RunSummary(
        n_pairs=n, n_split=n_split, n_bunched_up=int(b_up.sum()), n_bunched_down=int(b_down.sum()),
        n_coincidences=coinc, w_minus=w, w_minus_stderr=math.sqrt(w * (1 - w) / n),
        w_minus_analytic=total_probability(Sign.MINUS, run.params))
    return RunResult(events, summary)


@dataclass(frozen=True, eq=False)
class DensityHistogram:
    edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    n_split: int

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def empty(self) -> bool:
        return self.n_split == 0


def reconstruct_density(events: EventTable, bin_width: float, range: TimeGrid) -> DensityHistogram:
    """Histogram of t_up - t_down over split events, normalized to estimate f-/w-.

    Counts are divided by the total number of split events (in range or not),
    so the estimate integrates to one over the whole line.
    """
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    if bin_width < events.detector.temporal_resolution:
        raise ValueError("bin_width is finer than the detector resolution")
    n_bins = max(1, int(round((range.t_max - range.t_min) / bin_width)))
    edges = range.t_min + bin_width * np.arange(n_bins + 1)
    diffs = events.split_time_differences()
    counts, _ = np.histogram(diffs, bins=edges)
    n_split = len(diffs)
    density = counts / (n_split * bin_width) if n_split else np.zeros(n_bins)
    return DensityHistogram(edges, density, counts, n_split)


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def point_seed(base_seed: int, index: int) -> int:
    """Seed of scan point ``index``: splitmix64((base_seed + index) mod 2^64)."""
    return splitmix64((base_seed + index) & _MASK64)


@dataclass(frozen=True, eq=False)
class DipScanTable:
    delta_t: np.ndarray
    w_minus: np.ndarray
    stderr: np.ndarray
    w_minus_analytic: np.ndarray
    n_pairs: int

    def rows(self):
        return zip(self.delta_t, self.w_minus, self.stderr, self.w_minus_analytic)


def dip_scan(delta_t_values: Sequence[float], base_run: DetectionRun, max_workers: int | None = None) -> DipScanTable:
    """Empirical and analytic split probability over a set of delays.

    Points are sorted by delay; point k runs with seed ``point_seed(base_run.seed, k)``.
    """
    dts = sorted(float(v) for v in delta_t_values)
    if not dts:
        raise ValueError("delta_t_values is empty")
    if dts[0] < 0:
        raise ValueError("delays must be non-negative")
    runs = [replace(base_run, seed=point_seed(base_run.seed, k), params=base_run.params.with_delay(dt))
            for k, dt in enumerate(dts)]
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            summaries = [r.summary for r in pool.map(simulate_run, runs)]
    else:
        summaries = [simulate_run(r).summary for r in runs]
    return DipScanTable(
        delta_t=np.array(dts),
        w_minus=np.array([s.w_minus for s in summaries]),
        stderr=np.array([s.w_minus_stderr for s in summaries]),
        w_minus_analytic=np.array([s.w_minus_analytic for s in summaries]),
        n_pairs=base_run.n_pairs)
