"""One realization of the bond percolation process.

Edges open at independent Exponential(rate w_e) times; sweeping the open
events through a union-find in time order yields the largest / second-largest
component sizes as right-continuous step functions of time.  All stopping-time
statistics (hitting times for any threshold, maximal jump, second-largest
peak) are answered from the recorded sweep.

Two sweep products exist:

* :func:`run_trajectory` keeps the full event record, one entry per edge.
* :func:`merge_trace` keeps only the true merge events (at most n-1), found
  via adaptive partial sorting with early exit once a single component
  remains.  Both answer every statistic identically; the fast path is what
  the Monte Carlo ensembles use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .components import fenwick_add, fenwick_select, uf_find
from .graphs import WeightedGraph

__all__ = [
    "ThresholdError",
    "PercolationTrajectory",
    "MergeTrace",
    "sample_open_times",
    "open_times_from_uniform",
    "run_trajectory",
    "merge_trace",
    "threshold_from_fraction",
    "threshold_from_omega",
]


class ThresholdError(ValueError):
    """Component-size threshold outside the meaningful range [2, n]."""


# Absolute slack when converting real-valued thresholds (s*n, n/omega) to
# counts via ceil; absorbs float representation error without disturbing
# genuinely fractional values.
_CEIL_GUARD = 1e-9


def threshold_from_fraction(s: float, n: int) -> int:
    """Component-size count for 'a fraction s of all vertices': ceil(s*n)."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"fraction s must lie in (0, 1), got {s}")
    return math.ceil(s * n - _CEIL_GUARD)


def threshold_from_omega(omega: float, n: int) -> int:
    """Component-size count for 'n/omega vertices': ceil(n/omega).

    Requires omega >= 2; smaller values make the target trivially large.
    """
    if omega < 2.0:
        raise ThresholdError(f"omega must be >= 2, got {omega}")
    return math.ceil(n / omega - _CEIL_GUARD)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def open_times_from_uniform(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Inverse-CDF map: uniform draws in [0, 1) to Exponential(rate w) times."""
    return -np.log1p(-np.asarray(u, dtype=np.float64)) / w


def sample_open_times(g: WeightedGraph, rng: np.random.Generator) -> np.ndarray:
    """Independent opening times, one per edge: Exponential(rate w_e)."""
    return open_times_from_uniform(rng.random(g.edge_count), g.w)


# ---------------------------------------------------------------------------
# Sweep kernels
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _sweep(eu, ev, n, record_all):
    """Union-find sweep over events already in time order.

    Returns (event_pos, largest_after, second_after, count).  With
    record_all=True every event is recorded; otherwise only true merges are,
    and the sweep stops once a single component remains.
    """
    E = eu.shape[0]
    cap = E if record_all else min(E, n - 1 if n > 1 else 0)
    pos = np.empty(cap, np.int64)
    larg = np.empty(cap, np.int64)
    sec = np.empty(cap, np.int64)

    parent = np.arange(n)
    size = np.ones(n, np.int64)
    counts = np.zeros(n + 1, np.int64)
    counts[1] = n
    tree = np.zeros(n + 1, np.int64)
    fenwick_add(tree, 1, n)

    comp = n
    largest = 1
    second = 1 if n >= 2 else 0
    k = 0
    for i in range(E):
        ru = uf_find(parent, eu[i])
        rv = uf_find(parent, ev[i])
        if ru != rv:
            if size[ru] < size[rv] or (size[ru] == size[rv] and rv < ru):
                ru, rv = rv, ru
            sa = size[ru]
            sb = size[rv]
            parent[rv] = ru
            size[ru] = sa + sb
            counts[sa] -= 1
            counts[sb] -= 1
            counts[sa + sb] += 1
            fenwick_add(tree, sa, -1)
            fenwick_add(tree, sb, -1)
            fenwick_add(tree, sa + sb, 1)
            comp -= 1
            if sa + sb > largest:
                largest = sa + sb
            if comp == 1:
                second = 0
            elif counts[largest] >= 2:
                second = largest
            else:
                second = fenwick_select(tree, comp - counts[largest])
            pos[k] = i
            larg[k] = largest
            sec[k] = second
            k += 1
            if comp == 1 and not record_all:
                break
        elif record_all:
            pos[k] = i
            larg[k] = largest
            sec[k] = second
            k += 1
    return pos, larg, sec, k


# ---------------------------------------------------------------------------
# Shared statistic queries over (times, largest, second) step functions
# ---------------------------------------------------------------------------


def _query_hitting_time(times, largest, n, threshold):
    if threshold < 2:
        raise ThresholdError(
            f"threshold {threshold} is degenerate: a single vertex already "
            "forms a component of size 1"
        )
    if threshold > n:
        raise ThresholdError(f"threshold {threshold} unreachable on {n} vertices")
    idx = int(np.searchsorted(largest, threshold, side="left"))
    if idx >= len(largest):
        raise ThresholdError(
            f"threshold {threshold} never reached; trajectory is incomplete"
        )
    return float(times[idx])


def _query_value_at(times, largest, second, n, t):
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    idx = int(np.searchsorted(times, t, side="right")) - 1
    if idx < 0:
        return 1, min(1, n - 1)
    return int(largest[idx]), int(second[idx])


def _query_max_jump(largest, n):
    if len(largest) == 0:
        return 0.0
    jumps = np.diff(largest, prepend=1)
    return float(jumps.max()) / n


def _query_sup_second(second, n):
    initial = 1 if n >= 2 else 0
    peak = initial if len(second) == 0 else max(initial, int(second.max()))
    return peak / n


class _SweepRecord:
    """Query mixin over sorted (times, largest, second) arrays."""

    n: int
    times: np.ndarray
    largest: np.ndarray
    second: np.ndarray

    def hitting_time(self, threshold: int) -> float:
        """First time the largest component reaches `threshold` vertices."""
        return _query_hitting_time(self.times, self.largest, self.n, threshold)

    def value_at(self, t: float) -> tuple[int, int]:
        """(largest, second) sizes at time t, right-continuously."""
        return _query_value_at(self.times, self.largest, self.second, self.n, t)

    def max_jump_fraction(self) -> float:
        """Largest single-event increase of the leader, as a fraction of n."""
        return _query_max_jump(self.largest, self.n)

    def sup_second_fraction(self) -> float:
        """Peak second-largest component size over all time, as a fraction of n."""
        return _query_sup_second(self.second, self.n)


@dataclass(frozen=True, eq=False)
class PercolationTrajectory(_SweepRecord):
    """Full event record of one realization, one entry per edge.

    events are sorted by (time, edge id); `largest`/`second` hold the
    component sizes right after each event.
    """

    n: int
    times: np.ndarray
    edge_ids: np.ndarray
    largest: np.ndarray
    second: np.ndarray

    def jump_sizes(self) -> np.ndarray:
        """Per-event increase of the largest component (0 for no-op events)."""
        return np.diff(self.largest, prepend=1)

    def to_csv(self, path) -> None:
        """Dump events as CSV with header time,edge,largest,second."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time,edge,largest,second\n")
            for i in range(len(self.times)):
                fh.write(
                    f"{self.times[i]:.17g},{self.edge_ids[i]},"
                    f"{self.largest[i]},{self.second[i]}\n"
                )


@dataclass(frozen=True, eq=False)
class MergeTrace(_SweepRecord):
    """Merge-only view of a realization: the at most n-1 union events."""

    n: int
    times: np.ndarray
    largest: np.ndarray
    second: np.ndarray


def run_trajectory(g: WeightedGraph, times: np.ndarray) -> PercolationTrajectory:
    """Sweep all events in (time, edge id) order, recording every event."""
    times = np.asarray(times, dtype=np.float64)
    if times.shape != (g.edge_count,):
        raise ValueError(
            f"need one time per edge: got {times.shape}, expected ({g.edge_count},)"
        )
    order = np.argsort(times, kind="stable")  # stable = ties break by edge id
    pos, larg, sec, k = _sweep(g.u[order], g.v[order], g.vertex_count, True)
    return PercolationTrajectory(
        n=g.vertex_count,
        times=times[order],
        edge_ids=order,
        largest=larg[:k],
        second=sec[:k],
    )


def merge_trace(g: WeightedGraph, times: np.ndarray) -> MergeTrace:
    """Merge events of the realization, via partial sorting with early exit.

    Only the k earliest events are sorted, for growing k, until the sweep
    reaches a single component; the result is identical to extracting the
    merges from :func:`run_trajectory`.
    """
    times = np.asarray(times, dtype=np.float64)
    E = g.edge_count
    n = g.vertex_count
    if times.shape != (E,):
        raise ValueError(
            f"need one time per edge: got {times.shape}, expected ({E},)"
        )
    if n == 1:
        empty = np.empty(0)
        return MergeTrace(n=1, times=empty, largest=empty.astype(np.int64),
                          second=empty.astype(np.int64))
    k = min(E, max(4 * n, 1024))
    while True:
        if k >= E:
            sel = np.argsort(times, kind="stable")
        else:
            part = np.argpartition(times, k - 1)[:k]
            sel = part[np.lexsort((part, times[part]))]
            # only events strictly before the k-th smallest time are
            # guaranteed complete and correctly tie-ordered
            cut = int(np.searchsorted(times[sel], times[sel[-1]], side="left"))
            sel = sel[:cut]
        pos, larg, sec, m = _sweep(g.u[sel], g.v[sel], n, False)
        if m == n - 1:
            return MergeTrace(
                n=n,
                times=times[sel[pos[:m]]],
                largest=larg[:m],
                second=sec[:m],
            )
        if k >= E:
            raise AssertionError("connected graph failed to fully merge")
        k *= 4
