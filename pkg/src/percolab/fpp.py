"""First-passage percolation on the same weighted graphs.

The edge times xi_e double as traversal times: the passage time X(v, v') is
the minimum total xi along paths, computed exactly as single-source shortest
paths (label-setting on the sampled edge lengths).  Sorting X(v, .) gives the
infection curve |S(v, t)| for free, so the time to infect any number of sites
is an order statistic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graphs import WeightedGraph
from .montecarlo import variance_standard_error
from .percolation import sample_open_times, threshold_from_fraction
from .reports import CheckReport
from .rng import philox_key, replicate_rng

__all__ = [
    "FirstPassageField",
    "PassageSolver",
    "first_passage",
    "min_weight",
    "DiameterEstimate",
    "estimate_passage_diameter",
    "variance_bound_report",
    "ProductScanRow",
    "diameter_product_scan",
]


def min_weight(g: WeightedGraph) -> float:
    """Smallest edge rate; the slowest link controls the variance bounds."""
    return float(g.w.min())


@dataclass(frozen=True, eq=False)
class FirstPassageField:
    """Passage times X(source, v) for every vertex v (0 at the source)."""

    source: int
    times: np.ndarray

    @property
    def n(self) -> int:
        return int(self.times.size)

    def pandemic_time(self, threshold: int) -> float:
        """First time the infected set reaches `threshold` vertices: the
        threshold-th smallest passage time (the source counts, at time 0)."""
        if not 1 <= threshold <= self.n:
            raise ValueError(f"threshold must lie in [1, {self.n}], got {threshold}")
        return float(np.partition(self.times, threshold - 1)[threshold - 1])

    def infection_curve(self) -> tuple[np.ndarray, np.ndarray]:
        """(times, fractions): after sorting, the k-th passage time is when
        the infected fraction steps to k/n."""
        ts = np.sort(self.times)
        return ts, np.arange(1, self.n + 1) / self.n

    def infection_curve_csv(self, path) -> None:
        ts, fracs = self.infection_curve()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,fraction\n")
            for t, f in zip(ts, fracs):
                fh.write(f"{t:.17g},{f:.17g}\n")


class PassageSolver:
    """Reusable shortest-path machinery for one graph.

    The sparse adjacency structure is built once; each realization only swaps
    in its sampled edge lengths.
    """

    def __init__(self, g: WeightedGraph):
        self.graph = g
        n = g.vertex_count
        row = np.concatenate([g.u, g.v])
        col = np.concatenate([g.v, g.u])
        eid = np.concatenate([np.arange(g.edge_count), np.arange(g.edge_count)])
        order = np.argsort(row, kind="stable")
        self._indices = col[order].astype(np.int32)
        self._edge_map = eid[order]
        counts = np.bincount(row, minlength=n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)
        self._n = n

    def _matrix(self, times: np.ndarray) -> csr_matrix:
        data = np.asarray(times, dtype=np.float64)[self._edge_map]
        return csr_matrix(
            (data, self._indices, self._indptr), shape=(self._n, self._n)
        )

    def passage_times(self, times: np.ndarray, source: int) -> np.ndarray:
        """X(source, .) for the given edge-time sample."""
        return dijkstra(self._matrix(times), directed=False, indices=source)

    def passage_times_multi(self, times: np.ndarray, sources) -> np.ndarray:
        return dijkstra(self._matrix(times), directed=False, indices=sources)

    def all_pairs(self, times: np.ndarray) -> np.ndarray:
        return dijkstra(self._matrix(times), directed=False)


def first_passage(g: WeightedGraph, times: np.ndarray, source: int) -> FirstPassageField:
    """Exact passage times from one source under the given edge times."""
    if not 0 <= source < g.vertex_count:
        raise IndexError(f"source {source} out of range [0, {g.vertex_count})")
    times = np.asarray(times, dtype=np.float64)
    if times.shape != (g.edge_count,):
        raise ValueError(
            f"need one time per edge: got {times.shape}, expected ({g.edge_count},)"
        )
    x = PassageSolver(g).passage_times(times, source)
    return FirstPassageField(source=source, times=x)


# ---------------------------------------------------------------------------
# Ensemble estimates
# ---------------------------------------------------------------------------

_EXHAUSTIVE_PAIR_LIMIT = 200


@dataclass(frozen=True, eq=False)
class DiameterEstimate:
    """Estimated maximum over vertex pairs of the mean passage time.

    With pair sampling the maximum is over the sampled pairs only, so the
    value is an in-expectation lower bound on the true maximum.
    """

    value: float
    se: float
    argmax_pair: tuple[int, int]
    exhaustive: bool
    pair_means: dict

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "se": self.se,
            "argmax_pair": list(self.argmax_pair),
            "exhaustive": self.exhaustive,
        }


def estimate_passage_diameter(
    g: WeightedGraph,
    replicates: int,
    pair_budget: int = 512,
    seed: int = 0,
) -> DiameterEstimate:
    """Monte Carlo estimate of max_{v,v'} E X(v, v').

    All ordered pairs are enumerated when n <= 200; otherwise `pair_budget`
    distinct pairs are sampled uniformly.
    """
    if replicates < 2:
        raise ValueError("need at least 2 replicates")
    n = g.vertex_count
    solver = PassageSolver(g)
    key = philox_key(seed, "diameter")
    if n <= _EXHAUSTIVE_PAIR_LIMIT:
        acc = np.zeros((n, n))
        acc2 = np.zeros((n, n))
        for r in range(replicates):
            times = sample_open_times(g, replicate_rng(key, r))
            x = solver.all_pairs(times)
            acc += x
            acc2 += x * x
        means = acc / replicates
        np.fill_diagonal(means, -np.inf)  # exclude X(v, v) = 0 from the max
        flat = int(np.argmax(means))
        uu, vv = divmod(flat, n)
        value = float(means[uu, vv])
        var = acc2[uu, vv] / replicates - value * value
        se = float(np.sqrt(max(var, 0.0) / replicates))
        np.fill_diagonal(means, 0.0)
        pair_means = {
            (int(a), int(b)): float(means[a, b]) for a in range(n) for b in range(n) if a != b
        }
        return DiameterEstimate(
            value=value, se=se, argmax_pair=(uu, vv), exhaustive=True,
            pair_means=pair_means,
        )

    pick_rng = replicate_rng(philox_key(seed, "diameter_pairs"), 0)
    pairs: set[tuple[int, int]] = set()
    budget = min(pair_budget, n * (n - 1))
    while len(pairs) < budget:
        a = int(pick_rng.integers(n))
        b = int(pick_rng.integers(n))
        if a != b:
            pairs.add((a, b))
    pair_list = sorted(pairs)
    sources = sorted({a for a, _ in pair_list})
    src_index = {s: i for i, s in enumerate(sources)}
    acc = np.zeros(len(pair_list))
    acc2 = np.zeros(len(pair_list))
    for r in range(replicates):
        times = sample_open_times(g, replicate_rng(key, r))
        x = solver.passage_times_multi(times, sources)
        vals = np.array([x[src_index[a], b] for a, b in pair_list])
        acc += vals
        acc2 += vals * vals
    means = acc / replicates
    j = int(np.argmax(means))
    value = float(means[j])
    var = acc2[j] / replicates - value * value
    se = float(np.sqrt(max(var, 0.0) / replicates))
    return DiameterEstimate(
        value=value,
        se=se,
        argmax_pair=pair_list[j],
        exhaustive=False,
        pair_means={p: float(m) for p, m in zip(pair_list, means)},
    )


def variance_bound_report(
    g: WeightedGraph,
    source: int,
    target_vertices: Sequence[int] = (),
    fractions: Sequence[float] = (),
    replicates: int = 1000,
    seed: int = 0,
) -> list[CheckReport]:
    """Check var Q <= (E Q) / min_weight for passage quantities Q.

    Targets are point passage times X(source, v) and/or infection times to a
    fraction s of all vertices.  Each check passes iff the sample variance
    stays below the estimated bound plus 4 standard errors of the variance.
    """
    if replicates < 2:
        raise ValueError("need at least 2 replicates")
    n = g.vertex_count
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range [0, {n})")
    target_vertices = [int(v) for v in target_vertices]
    for v in target_vertices:
        if not 0 <= v < n:
            raise IndexError(f"target {v} out of range [0, {n})")
    thresholds = [threshold_from_fraction(float(s), n) for s in fractions]
    solver = PassageSolver(g)
    key = philox_key(seed, "varbound")
    cols = len(target_vertices) + len(thresholds)
    samples = np.empty((replicates, cols))
    for r in range(replicates):
        times = sample_open_times(g, replicate_rng(key, r))
        x = solver.passage_times(times, source)
        j = 0
        for v in target_vertices:
            samples[r, j] = x[v]
            j += 1
        if thresholds:
            xs = np.sort(x)
            for k in thresholds:
                samples[r, j] = xs[k - 1]
                j += 1

    w_star = min_weight(g)
    reports = []
    labels = [f"X({source}->{v})" for v in target_vertices] + [
        f"T({source}, s={float(s):g})" for s in fractions
    ]
    for j, label in enumerate(labels):
        vals = samples[:, j]
        mean = float(vals.mean())
        var = float(vals.var(ddof=1))
        bound = mean / w_star
        se_var = variance_standard_error(vals)
        reports.append(
            CheckReport(
                check="fpp_variance_bound",
                graph=g.label or repr(g),
                params={"quantity": label, "replicates": replicates},
                statistic=var,
                passed=var <= bound + 4.0 * se_var,
                details={
                    "mean": mean,
                    "bound": bound,
                    "se_variance": se_var,
                    "ratio": var / bound if bound > 0 else float("inf"),
                    "min_weight": w_star,
                },
            )
        )
    return reports


@dataclass(frozen=True)
class ProductScanRow:
    size: int
    min_weight: float
    diameter: float
    product: float


def diameter_product_scan(
    family: Callable[[int], WeightedGraph],
    sizes: Sequence[int],
    replicates: int = 200,
    pair_budget: int = 512,
    seed: int = 0,
) -> tuple[list[ProductScanRow], bool]:
    """Empirical trend of min_weight * passage diameter along a graph family.

    A growing product is the regime where infection times concentrate after
    rescaling; this is a diagnostic table, not a proof.
    """
    if len(sizes) < 2:
        raise ValueError("need at least 2 sizes")
    rows = []
    for i, size in enumerate(sizes):
        g = family(int(size))
        est = estimate_passage_diameter(
            g, replicates=replicates, pair_budget=pair_budget, seed=seed + i
        )
        ws = min_weight(g)
        rows.append(
            ProductScanRow(
                size=int(size),
                min_weight=ws,
                diameter=est.value,
                product=ws * est.value,
            )
        )
    increasing = all(b.product > a.product for a, b in zip(rows, rows[1:]))
    return rows, increasing
