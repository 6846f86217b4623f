"""Exact mean hitting times on small graphs, by sweeping all edge subsets.

The open-edge set evolves as a pure-growth Markov chain (state = subset of
edges, a closed edge e joins at rate w_e), so the expected time h(S) until
the largest component first reaches a threshold satisfies

    h(S) = 1/W(S) + sum_{e not in S} (w_e / W(S)) * h(S + e),   W(S) = total
    closed rate,

with h(S) = 0 on absorbing subsets.  Because transitions only add edges, the
table resolves in a single pass over subsets in decreasing-cardinality order;
no linear solve is involved.  Exact tables back the structural inequality
checks (monotonicity along transitions, the two-threshold coupling bound)
with zero statistical error, limited to |E| <= 22.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graphs import WeightedGraph
from .montecarlo import hitting_time_samples
from .percolation import ThresholdError, threshold_from_omega
from .reports import CheckReport

__all__ = [
    "MAX_EXACT_EDGES",
    "REL_SLACK",
    "HittingTable",
    "exact_hitting_table",
    "verify_monotone",
    "verify_coupling_bound",
    "mc_submultiplicativity",
]

MAX_EXACT_EDGES = 22
# double-precision slack for "exact" inequality checks, relative to the
# table's largest entry (accumulation across up to 2**22 terms)
REL_SLACK = 1e-12


@njit(cache=True, nogil=True)
def _hitting_values(eu, ev, w, n, threshold):
    E = eu.shape[0]
    M = 1 << E
    pc = np.empty(M, np.int8)
    pc[0] = 0
    for m in range(1, M):
        pc[m] = pc[m >> 1] + (m & 1)
    counts = np.zeros(E + 1, np.int64)
    for m in range(M):
        counts[pc[m]] += 1
    start = np.zeros(E + 1, np.int64)
    acc = 0
    for c in range(E, -1, -1):
        start[c] = acc
        acc += counts[c]
    order = np.empty(M, np.int64)
    fill = start.copy()
    for m in range(M):
        c = pc[m]
        order[fill[c]] = m
        fill[c] += 1

    h = np.zeros(M, np.float64)
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    for oi in range(M):
        m = order[oi]
        # largest component with exactly the edges of m open
        for i in range(n):
            parent[i] = i
            size[i] = 1
        largest = 1
        for e in range(E):
            if (m >> e) & 1:
                ru = eu[e]
                while parent[ru] != ru:
                    parent[ru] = parent[parent[ru]]
                    ru = parent[ru]
                rv = ev[e]
                while parent[rv] != rv:
                    parent[rv] = parent[parent[rv]]
                    rv = parent[rv]
                if ru != rv:
                    if size[ru] < size[rv]:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    size[ru] += size[rv]
                    if size[ru] > largest:
                        largest = size[ru]
        if largest >= threshold:
            h[m] = 0.0
        else:
            closed_rate = 0.0
            acc_h = 1.0
            for e in range(E):
                if not ((m >> e) & 1):
                    closed_rate += w[e]
                    acc_h += w[e] * h[m | (1 << e)]
            h[m] = acc_h / closed_rate
    return h


@njit(cache=True, nogil=True)
def _max_transition_increase(h, E):
    # max over (S, closed e) of h(S + e) - h(S); theory says <= 0
    best = -np.inf
    for m in range(h.shape[0]):
        hm = h[m]
        for e in range(E):
            if not ((m >> e) & 1):
                d = h[m | (1 << e)] - hm
                if d > best:
                    best = d
    return best


@njit(cache=True, nogil=True)
def _max_coupling_excess(h1, h2, E):
    # max over (S, closed e) of h1(S) - h2(S + e); theory says <= 0
    best = -np.inf
    for m in range(h1.shape[0]):
        hm = h1[m]
        for e in range(E):
            if not ((m >> e) & 1):
                d = hm - h2[m | (1 << e)]
                if d > best:
                    best = d
    return best


@dataclass(frozen=True, eq=False)
class HittingTable:
    """h(S) for every edge subset S (indexed by bitmask over edge ids)."""

    graph: WeightedGraph
    threshold: int
    values: np.ndarray

    @property
    def expected_time(self) -> float:
        """h of the empty set: mean time from all-closed to the threshold."""
        return float(self.values[0])

    def value(self, mask: int) -> float:
        return float(self.values[mask])

    @property
    def scale(self) -> float:
        return float(np.max(self.values))


def exact_hitting_table(g: WeightedGraph, threshold: int) -> HittingTable:
    """Exact expected hitting times for every starting subset.

    Time and memory are O(2^|E| * |E|); refuses graphs with more than 22
    edges.
    """
    if g.edge_count > MAX_EXACT_EDGES:
        raise ValueError(
            f"exact table needs |E| <= {MAX_EXACT_EDGES}, got {g.edge_count}"
        )
    n = g.vertex_count
    if not 2 <= threshold <= n:
        raise ThresholdError(f"threshold must lie in [2, {n}], got {threshold}")
    values = _hitting_values(g.u, g.v, g.w, n, threshold)
    return HittingTable(graph=g, threshold=threshold, values=values)


def verify_monotone(table: HittingTable) -> CheckReport:
    """Check that opening any edge never increases the expected hitting time,
    exhaustively over all transitions of the subset chain."""
    violation = float(_max_transition_increase(table.values, table.graph.edge_count))
    slack = REL_SLACK * max(table.scale, 1e-300)
    return CheckReport(
        check="monotone_hitting_times",
        graph=table.graph.label or repr(table.graph),
        params={"threshold": table.threshold},
        statistic=violation,
        passed=violation <= slack,
        details={"slack": slack, "expected_time": table.expected_time},
    )


def verify_coupling_bound(g: WeightedGraph, omega: float) -> CheckReport:
    """Check h(S') <= h2(S' + e) for every transition, where h targets
    ceil(n/omega) and h2 targets the doubled count ceil(2n/omega).

    This is the exact form of the coupling argument bounding how much one
    extra open edge can shorten the wait: removing that edge from a
    component of size 2n/omega still leaves a piece of size n/omega.
    """
    if omega < 2.0:
        raise ThresholdError(f"coupling bound needs omega >= 2, got {omega}")
    n = g.vertex_count
    k1 = threshold_from_omega(omega, n)
    if k1 < 2:
        raise ThresholdError(
            f"omega={omega} gives degenerate threshold {k1} on n={n}"
        )
    k2 = math.ceil(2.0 * n / omega - 1e-9)
    t1 = exact_hitting_table(g, k1)
    t2 = exact_hitting_table(g, min(k2, n))
    excess = float(_max_coupling_excess(t1.values, t2.values, g.edge_count))
    slack = REL_SLACK * max(t2.scale, 1e-300)
    return CheckReport(
        check="coupling_bound",
        graph=g.label or repr(g),
        params={"omega": omega, "threshold": k1, "threshold_doubled": k2},
        statistic=excess,
        passed=excess <= slack,
        details={
            "slack": slack,
            "expected_time": t1.expected_time,
            "expected_time_doubled": t2.expected_time,
        },
    )


def mc_submultiplicativity(
    g: WeightedGraph,
    threshold: int,
    t1: float,
    t2: float,
    replicates: int,
    seed: int,
    workers: int = 1,
) -> CheckReport:
    """Statistical check of P(T > t1+t2) <= P(T > t1) P(T > t2).

    Three independent ensembles estimate the three tail probabilities; the
    report's statistic is the z-score of the difference under the
    delta-method standard error, and the check passes iff z <= 3.
    """
    if min(t1, t2) < 0:
        raise ValueError("t1 and t2 must be non-negative")
    tails = []
    for i, t in enumerate((t1 + t2, t1, t2)):
        samples = hitting_time_samples(
            g, [threshold], replicates, seed, path=("submult", i), workers=workers
        )[:, 0]
        tails.append(float(np.mean(samples > t)))
    p12, p1, p2 = tails
    diff = p12 - p1 * p2
    r = replicates
    se = math.sqrt(
        p12 * (1 - p12) / r
        + (p2 * p2) * p1 * (1 - p1) / r
        + (p1 * p1) * p2 * (1 - p2) / r
    )
    if se == 0.0:
        z = 0.0 if diff <= 0 else math.inf
    else:
        z = diff / se
    return CheckReport(
        check="submultiplicativity",
        graph=g.label or repr(g),
        params={"threshold": threshold, "t1": t1, "t2": t2, "replicates": replicates},
        statistic=z,
        passed=z <= 3.0,
        details={"p12": p12, "p1": p1, "p2": p2, "difference": diff, "se": se},
    )
