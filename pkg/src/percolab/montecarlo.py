"""Reproducible replicate ensembles and concentration scans.

Replicate r of an ensemble draws from a counter-based stream that is a pure
function of (master seed, r), so results are bit-identical whether replicates
run on one worker or many, in any order.  Aggregation is order-independent:
per-replicate values land in slot r and summaries are computed at the end.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .graphs import WeightedGraph
from .percolation import (
    ThresholdError,
    merge_trace,
    sample_open_times,
    threshold_from_fraction,
    threshold_from_omega,
)
from .rng import philox_key, replicate_rng

__all__ = [
    "SummaryStats",
    "ExperimentSpec",
    "STATISTICS",
    "run_ensemble",
    "hitting_time_samples",
    "estimate_curve",
    "CurveEstimate",
    "concentration_scan",
    "ScanRow",
    "omega_sweep",
    "OmegaRow",
    "variance_standard_error",
]


@dataclass(frozen=True)
class SummaryStats:
    """Ensemble summary: count, mean, unbiased variance, SE of mean, extremes."""

    count: int
    mean: float
    variance: float
    se: float
    min: float
    max: float

    @classmethod
    def from_values(cls, values: np.ndarray) -> "SummaryStats":
        values = np.asarray(values, dtype=np.float64)
        r = values.size
        if r < 1:
            raise ValueError("need at least one value")
        var = float(values.var(ddof=1)) if r >= 2 else 0.0
        return cls(
            count=r,
            mean=float(values.mean()),
            variance=var,
            se=float(np.sqrt(var / r)),
            min=float(values.min()),
            max=float(values.max()),
        )

    def merge(self, other: "SummaryStats") -> "SummaryStats":
        """Combine two disjoint ensembles (parallel reduction); matches the
        single-pass result up to rounding."""
        na, nb = self.count, other.count
        n = na + nb
        delta = other.mean - self.mean
        mean = self.mean + delta * nb / n
        m2 = (
            self.variance * (na - 1)
            + other.variance * (nb - 1)
            + delta * delta * na * nb / n
        )
        var = m2 / (n - 1) if n >= 2 else 0.0
        return SummaryStats(
            count=n,
            mean=mean,
            variance=var,
            se=float(np.sqrt(var / n)),
            min=min(self.min, other.min),
            max=max(self.max, other.max),
        )

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "se": self.se,
            "min": self.min,
            "max": self.max,
        }


def variance_standard_error(values: np.ndarray) -> float:
    """Standard error of the unbiased sample variance.

    Uses Var(s^2) = m4/R - s^4 (R-3) / (R (R-1)) with the plug-in central
    fourth moment m4.
    """
    values = np.asarray(values, dtype=np.float64)
    r = values.size
    if r < 2:
        return float("nan")
    centered = values - values.mean()
    m4 = float(np.mean(centered**4))
    s2 = float(values.var(ddof=1))
    var_of_var = m4 / r - s2 * s2 * (r - 3) / (r * (r - 1))
    return float(np.sqrt(max(var_of_var, 0.0)))


STATISTICS = (
    "incipient_time",        # first time largest >= n/omega          (param: omega)
    "time_to_fraction",      # first time largest >= s*n              (param: s)
    "max_jump_fraction",     # peak single-merge growth of the leader
    "sup_second_fraction",   # peak second-largest component fraction
    "fpp_time_to_fraction",  # first-passage time to infect s*n sites (param: s, source)
    "fpp_point_passage",     # first-passage time source -> target    (source, target)
)


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    """What to measure: graph, statistic, parameter, replicate count, seed."""

    graph: WeightedGraph
    statistic: str
    param: float | None = None
    source: int | None = None
    target: int | None = None
    replicates: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(
                f"unknown statistic {self.statistic!r}; choose from {STATISTICS}"
            )
        n = self.graph.vertex_count
        if self.statistic == "incipient_time":
            if self.param is None or self.param < 2.0:
                raise ValueError("incipient_time needs param omega >= 2")
            if threshold_from_omega(self.param, n) < 2:
                raise ValueError(
                    f"omega={self.param} gives a degenerate threshold below 2"
                )
        if self.statistic in ("time_to_fraction", "fpp_time_to_fraction"):
            if self.param is None or not 0.0 < self.param < 1.0:
                raise ValueError(f"{self.statistic} needs param s in (0, 1)")
        if self.statistic.startswith("fpp"):
            if self.source is None or not 0 <= self.source < n:
                raise ValueError(f"{self.statistic} needs a valid source vertex")
        if self.statistic == "fpp_point_passage":
            if self.target is None or not 0 <= self.target < n:
                raise ValueError("fpp_point_passage needs a valid target vertex")
        if self.replicates < 2:
            raise ValueError("need at least 2 replicates")


def _run_indexed(fn: Callable[[int], float], count: int, workers: int) -> np.ndarray:
    values = np.empty(count, dtype=np.float64)
    if workers <= 1:
        for r in range(count):
            values[r] = fn(r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, value in enumerate(pool.map(fn, range(count))):
                values[r] = value
    return values


def _make_extractor(spec: ExperimentSpec) -> Callable[[np.random.Generator], float]:
    g = spec.graph
    n = g.vertex_count
    stat = spec.statistic
    if stat == "incipient_time":
        threshold = threshold_from_omega(spec.param, n)
        return lambda rng: merge_trace(g, sample_open_times(g, rng)).hitting_time(
            threshold
        )
    if stat == "time_to_fraction":
        threshold = threshold_from_fraction(spec.param, n)
        return lambda rng: merge_trace(g, sample_open_times(g, rng)).hitting_time(
            threshold
        )
    if stat == "max_jump_fraction":
        return lambda rng: merge_trace(g, sample_open_times(g, rng)).max_jump_fraction()
    if stat == "sup_second_fraction":
        return lambda rng: merge_trace(
            g, sample_open_times(g, rng)
        ).sup_second_fraction()
    # first-passage statistics share one solver across replicates
    from .fpp import PassageSolver

    solver = PassageSolver(g)
    if stat == "fpp_time_to_fraction":
        threshold = threshold_from_fraction(spec.param, n)
        source = spec.source

        def fpp_fraction(rng):
            x = solver.passage_times(sample_open_times(g, rng), source)
            return float(np.partition(x, threshold - 1)[threshold - 1])

        return fpp_fraction
    source, target = spec.source, spec.target

    def fpp_point(rng):
        x = solver.passage_times(sample_open_times(g, rng), source)
        return float(x[target])

    return fpp_point


def run_ensemble(
    spec: ExperimentSpec, workers: int = 1, return_values: bool = False
):
    """Run the ensemble; returns SummaryStats (and per-replicate values on
    request).  Deterministic for a fixed spec, independent of `workers`."""
    key = philox_key(spec.seed, "ensemble")
    extract = _make_extractor(spec)
    values = _run_indexed(
        lambda r: extract(replicate_rng(key, r)), spec.replicates, workers
    )
    stats = SummaryStats.from_values(values)
    if return_values:
        return stats, values
    return stats


def hitting_time_samples(
    g: WeightedGraph,
    thresholds: Sequence[int],
    replicates: int,
    seed: int,
    path: tuple = (),
    workers: int = 1,
) -> np.ndarray:
    """Per-replicate hitting times at several thresholds from shared sweeps.

    Returns an array of shape (replicates, len(thresholds)); one realization
    per replicate answers every threshold.
    """
    thresholds = list(thresholds)
    n = g.vertex_count
    for k in thresholds:
        if not 2 <= k <= n:
            raise ThresholdError(f"threshold {k} outside [2, {n}]")
    key = philox_key(seed, "hitting", *path)
    out = np.empty((replicates, len(thresholds)), dtype=np.float64)

    def one(r: int) -> float:
        trace = merge_trace(g, sample_open_times(g, replicate_rng(key, r)))
        for j, k in enumerate(thresholds):
            out[r, j] = trace.hitting_time(k)
        return 0.0

    _run_indexed(one, replicates, workers)
    return out


@dataclass(frozen=True, eq=False)
class CurveEstimate:
    """Per-grid-point summaries of the largest/second component fractions."""

    grid: np.ndarray
    largest: list
    second: list
    largest_values: np.ndarray | None = None
    second_values: np.ndarray | None = None


def estimate_curve(
    g: WeightedGraph,
    grid: Sequence[float],
    replicates: int,
    seed: int,
    workers: int = 1,
    return_values: bool = False,
) -> CurveEstimate:
    """Estimate E C(t)/n and E C2(t)/n on a sorted time grid."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size < 1 or np.any(np.diff(grid) < 0):
        raise ValueError("grid must be non-empty and sorted ascending")
    n = g.vertex_count
    key = philox_key(seed, "curve")
    big = np.empty((replicates, grid.size), dtype=np.float64)
    small = np.empty((replicates, grid.size), dtype=np.float64)
    init_second = 1.0 if n >= 2 else 0.0

    def one(r: int) -> float:
        trace = merge_trace(g, sample_open_times(g, replicate_rng(key, r)))
        idx = np.searchsorted(trace.times, grid, side="right") - 1
        inside = idx >= 0
        big[r] = np.where(inside, trace.largest[np.maximum(idx, 0)], 1.0) / n
        small[r] = np.where(inside, trace.second[np.maximum(idx, 0)], init_second) / n
        return 0.0

    _run_indexed(one, replicates, workers)
    return CurveEstimate(
        grid=grid,
        largest=[SummaryStats.from_values(big[:, j]) for j in range(grid.size)],
        second=[SummaryStats.from_values(small[:, j]) for j in range(grid.size)],
        largest_values=big if return_values else None,
        second_values=small if return_values else None,
    )


@dataclass(frozen=True, eq=False)
class ScanRow:
    size: int
    stats: SummaryStats
    values: np.ndarray


def concentration_scan(
    family: Callable[[int], WeightedGraph],
    sizes: Sequence[int],
    statistic: str,
    param: float,
    replicates: int,
    seed: int,
    workers: int = 1,
) -> list[ScanRow]:
    """Variance-vs-size scan of a stopping-time statistic along a graph
    family; the variance trend across sizes is the concentration diagnostic."""
    if len(sizes) < 2:
        raise ValueError("need at least 2 sizes to scan")
    rows = []
    for size in sizes:
        g = family(int(size))
        spec = ExperimentSpec(
            graph=g,
            statistic=statistic,
            param=param,
            replicates=replicates,
            seed=_mix_seed(seed, int(size)),
        )
        stats, values = run_ensemble(spec, workers=workers, return_values=True)
        rows.append(ScanRow(size=int(size), stats=stats, values=values))
    return rows


def _mix_seed(seed: int, size: int) -> int:
    # distinct, deterministic per-size master seeds
    return int(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(size,)).generate_state(1)[
            0
        ]
    )


@dataclass(frozen=True, eq=False)
class OmegaRow:
    omega: float
    stats_time: SummaryStats
    stats_gap: SummaryStats
    times: np.ndarray
    gaps: np.ndarray


def omega_sweep(
    g: WeightedGraph,
    omegas: Sequence[float],
    replicates: int,
    seed: int,
    workers: int = 1,
) -> list[OmegaRow]:
    """Per omega: the incipient time at n/omega and the paired within-replicate
    gap to the doubled target n/(omega/2) (always non-negative).

    Requires omega >= 4 so the halved omega stays within the >= 2 convention.
    """
    n = g.vertex_count
    omegas = [float(w) for w in omegas]
    for w in omegas:
        if w < 4.0:
            raise ValueError(f"paired omega statistic needs omega >= 4, got {w}")
        if threshold_from_omega(w, n) < 2:
            raise ValueError(f"omega={w} gives a degenerate threshold on n={n}")
    thresholds = []
    pairs = []
    for w in omegas:
        k = threshold_from_omega(w, n)
        k_half = threshold_from_omega(w / 2.0, n)
        pairs.append((k, k_half))
        thresholds.extend([k, k_half])
    uniq = sorted(set(thresholds))
    col = {k: j for j, k in enumerate(uniq)}
    samples = hitting_time_samples(
        g, uniq, replicates, seed, path=("omega_sweep",), workers=workers
    )
    rows = []
    for w, (k, k_half) in zip(omegas, pairs):
        t_w = samples[:, col[k]]
        gap = samples[:, col[k_half]] - t_w
        rows.append(
            OmegaRow(
                omega=w,
                stats_time=SummaryStats.from_values(t_w),
                stats_gap=SummaryStats.from_values(gap),
                times=t_w,
                gaps=gap,
            )
        )
    return rows
