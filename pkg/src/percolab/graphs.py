"""Finite connected weighted graphs: validation, generators, edge-list IO.

Vertices are dense integers [0, n).  Edges are simple (no self-loops, no
parallel edges) and carry strictly positive finite rates.  Every constructor
validates the full invariant set, including connectivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .components import count_components

__all__ = [
    "WeightedGraph",
    "GraphValidationError",
    "InvalidSizeError",
    "GenerationError",
    "EdgeListParseError",
    "make_complete",
    "make_torus",
    "make_line_exp",
    "make_coupled_complete",
    "make_random_regular",
    "parse_edge_list",
    "serialize_edge_list",
]


class GraphValidationError(ValueError):
    """An edge set violates the weighted-graph invariants."""


class InvalidSizeError(ValueError):
    """Generator size parameters out of their admissible range."""


class GenerationError(RuntimeError):
    """A randomized generator exhausted its rejection budget."""


class EdgeListParseError(ValueError):
    """Malformed edge-list input; `line` is the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Simple connected graph with positive per-edge rates.

    Edge ``i`` is the unordered pair ``(u[i], v[i])`` with rate ``w[i]``; the
    position ``i`` is the edge's stable id.  Instances are immutable and safe
    to share across threads.
    """

    vertex_count: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        n = self.vertex_count
        u = np.ascontiguousarray(self.u, dtype=np.int64)
        v = np.ascontiguousarray(self.v, dtype=np.int64)
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        if n < 1:
            raise GraphValidationError(f"need at least one vertex, got {n}")
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise GraphValidationError("edge arrays must be 1-d and equal length")
        if u.size:
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise GraphValidationError("edge endpoint out of range [0, n)")
            if np.any(u == v):
                raise GraphValidationError("self-loops are not allowed")
            if not np.all(np.isfinite(w)) or w.min() <= 0.0:
                raise GraphValidationError("edge weights must be positive and finite")
            lo = np.minimum(u, v)
            hi = np.maximum(u, v)
            key = lo * np.int64(n) + hi
            if np.unique(key).size != key.size:
                raise GraphValidationError("duplicate edges are not allowed")
        if count_components(n, u, v) != 1:
            raise GraphValidationError("graph is not connected")
        for arr in (u, v, w):
            arr.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.u.size)

    def edges(self):
        """Iterate (u, v, w) tuples in edge-id order."""
        for i in range(self.edge_count):
            yield int(self.u[i]), int(self.v[i]), float(self.w[i])

    def total_rate(self) -> float:
        return float(self.w.sum())

    def same_edges(self, other: "WeightedGraph") -> bool:
        """Equality of vertex count and edge multiset (order-insensitive)."""
        if self.vertex_count != other.vertex_count:
            return False
        if self.edge_count != other.edge_count:
            return False
        a = sorted(
            (min(x, y), max(x, y), z) for x, y, z in self.edges()
        )
        b = sorted(
            (min(x, y), max(x, y), z) for x, y, z in other.edges()
        )
        return a == b

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label else ""
        return f"WeightedGraph(n={self.vertex_count}, edges={self.edge_count}{tag})"


def from_edge_tuples(n: int, edge_tuples, label: str = "") -> WeightedGraph:
    """Build a graph from an iterable of (u, v, weight) tuples."""
    edge_tuples = list(edge_tuples)
    if edge_tuples:
        u, v, w = (np.array(col) for col in zip(*edge_tuples))
    else:
        u = v = np.empty(0, dtype=np.int64)
        w = np.empty(0, dtype=np.float64)
    return WeightedGraph(n, u, v, w, label=label)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def make_complete(m: int, weight: float) -> WeightedGraph:
    """Complete graph on m vertices, every edge with the same rate."""
    if m < 2:
        raise InvalidSizeError(f"complete graph needs m >= 2, got {m}")
    u, v = np.triu_indices(m, k=1)
    w = np.full(u.size, float(weight))
    return WeightedGraph(m, u, v, w, label=f"complete(m={m}, w={weight:g})")


def make_torus(L: int, weight: float) -> WeightedGraph:
    """2-d discrete torus of side L: L**2 vertices, 2*L**2 edges, constant
    rate, periodic nearest-neighbor adjacency."""
    if L < 3:
        raise InvalidSizeError(f"torus needs L >= 3, got {L}")
    x, y = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    idx = (x * L + y).ravel()
    right = ((x + 1) % L * L + y).ravel()
    down = (x * L + (y + 1) % L).ravel()
    u = np.concatenate([idx, idx])
    v = np.concatenate([right, down])
    w = np.full(u.size, float(weight))
    return WeightedGraph(L * L, u, v, w, label=f"torus(L={L}, w={weight:g})")


def make_line_exp(n: int) -> WeightedGraph:
    """Path on n vertices whose i-th edge (1-based) has rate 2**-i.

    Capped at n <= 60 so the smallest rate keeps meaningful dynamic range in
    double precision.
    """
    if not 2 <= n <= 60:
        raise InvalidSizeError(f"line_exp needs 2 <= n <= 60, got {n}")
    u = np.arange(n - 1)
    v = np.arange(1, n)
    w = 0.5 ** np.arange(1, n, dtype=np.float64)
    return WeightedGraph(n, u, v, w, label=f"line_exp(n={n})")


def make_coupled_complete(m: int, mode: str) -> WeightedGraph:
    """Two complete graphs on m vertices (rates 1/m) joined across.

    mode="bridge": one extra edge of rate m between vertex 0 and vertex m.
    mode="transitive": all m*m cross edges, each of rate 1/m**2 (the
    vertex-transitive variant).
    """
    if m < 2:
        raise InvalidSizeError(f"coupled complete graph needs m >= 2, got {m}")
    if mode not in ("bridge", "transitive"):
        raise ValueError(f"mode must be 'bridge' or 'transitive', got {mode!r}")
    a_u, a_v = np.triu_indices(m, k=1)
    us = [a_u, a_u + m]
    vs = [a_v, a_v + m]
    ws = [np.full(a_u.size, 1.0 / m), np.full(a_u.size, 1.0 / m)]
    if mode == "bridge":
        us.append(np.array([0]))
        vs.append(np.array([m]))
        ws.append(np.array([float(m)]))
    else:
        left, right = np.meshgrid(np.arange(m), np.arange(m, 2 * m), indexing="ij")
        us.append(left.ravel())
        vs.append(right.ravel())
        ws.append(np.full(m * m, 1.0 / (m * m)))
    return WeightedGraph(
        2 * m,
        np.concatenate(us),
        np.concatenate(vs),
        np.concatenate(ws),
        label=f"coupled(m={m}, {mode})",
    )


_REGULAR_MAX_ATTEMPTS = 1000


def make_random_regular(
    n: int, r: int, weight: float, rng: np.random.Generator
) -> WeightedGraph:
    """Uniform-ish simple connected r-regular graph via the pairing model.

    Stubs are shuffled and paired; any attempt producing a self-loop, a
    repeated pair, or a disconnected graph is rejected wholesale.  Gives up
    after 1000 attempts.
    """
    if r < 3:
        raise InvalidSizeError(f"need degree r >= 3, got {r}")
    if n <= r:
        raise InvalidSizeError(f"need n > r, got n={n}, r={r}")
    if (n * r) % 2 != 0:
        raise InvalidSizeError(f"n*r must be even, got n={n}, r={r}")
    stubs = np.repeat(np.arange(n), r)
    for _ in range(_REGULAR_MAX_ATTEMPTS):
        perm = rng.permutation(stubs)
        a = perm[0::2]
        b = perm[1::2]
        if np.any(a == b):
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        key = lo * np.int64(n) + hi
        if np.unique(key).size != key.size:
            continue
        if count_components(n, a, b) != 1:
            continue
        w = np.full(a.size, float(weight))
        return WeightedGraph(n, a, b, w, label=f"regular(n={n}, r={r}, w={weight:g})")
    raise GenerationError(
        f"no simple connected {r}-regular graph on {n} vertices found in "
        f"{_REGULAR_MAX_ATTEMPTS} pairing attempts"
    )


# ---------------------------------------------------------------------------
# Edge-list text format
# ---------------------------------------------------------------------------
#
# line 1: vertex count n
# then one edge per line: "u v w" (0-based endpoints, decimal weight)
# '#' starts a comment; blank lines ignored; LF or CRLF.


def parse_edge_list(text: str | bytes, label: str = "") -> WeightedGraph:
    """Parse the plain edge-list format, validating all graph invariants.

    Errors carry the 1-based line number of the offending input line.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n: int | None = None
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if n is None:
            try:
                n = int(content)
            except ValueError:
                raise EdgeListParseError(
                    f"expected vertex count, got {content!r}", lineno
                ) from None
            if n < 1:
                raise EdgeListParseError(f"vertex count must be >= 1, got {n}", lineno)
            continue
        parts = content.split()
        if len(parts) != 3:
            raise EdgeListParseError(
                f"expected 'u v w', got {content!r}", lineno
            )
        try:
            eu, ev = int(parts[0]), int(parts[1])
            ew = float(parts[2])
        except ValueError:
            raise EdgeListParseError(
                f"could not parse edge {content!r}", lineno
            ) from None
        if not (0 <= eu < n and 0 <= ev < n):
            raise EdgeListParseError(
                f"endpoint out of range [0, {n}): {eu} {ev}", lineno
            )
        if eu == ev:
            raise EdgeListParseError(f"self-loop at vertex {eu}", lineno)
        if not math.isfinite(ew) or ew <= 0.0:
            raise EdgeListParseError(f"weight must be positive, got {parts[2]}", lineno)
        pair = (min(eu, ev), max(eu, ev))
        if pair in seen:
            raise EdgeListParseError(f"duplicate edge {pair[0]} {pair[1]}", lineno)
        seen.add(pair)
        edges.append((eu, ev, ew))
    if n is None:
        raise EdgeListParseError("empty input: missing vertex count line")
    try:
        return from_edge_tuples(n, edges, label=label)
    except GraphValidationError as exc:
        raise EdgeListParseError(str(exc)) from exc


def serialize_edge_list(g: WeightedGraph) -> str:
    """Serialize to the edge-list format (LF lines, 17 significant digits,
    so parse(serialize(g)) round-trips exactly)."""
    lines = [str(g.vertex_count)]
    lines.extend(f"{u} {v} {w:.17g}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"
