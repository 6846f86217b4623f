"""Union-find over vertices with largest / second-largest component tracking.

``ComponentTracker`` is the readable reference structure used by tests and
small sweeps.  The hot simulation kernels in :mod:`percolab.percolation`
re-implement the same logic over flat arrays inside numba; a randomized
property test keeps the two in agreement.

The multiset of live component sizes is kept in a Fenwick tree indexed by
size, so recovering the second-largest size after any merge (including the
awkward case where the old second-largest component is absorbed) costs
O(log n).
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["ComponentTracker"]


# ---------------------------------------------------------------------------
# njit primitives shared with the sweep kernels
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def uf_find(parent: np.ndarray, x: int) -> int:
    """Root of x with path halving."""
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def fenwick_add(tree: np.ndarray, i: int, delta: int) -> None:
    n = tree.shape[0] - 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True, nogil=True)
def fenwick_select(tree: np.ndarray, k: int) -> int:
    """Smallest index i with prefix_sum(i) >= k (k >= 1)."""
    n = tree.shape[0] - 1
    bit = 1
    while (bit << 1) <= n:
        bit <<= 1
    pos = 0
    rem = k
    while bit:
        nxt = pos + bit
        if nxt <= n and tree[nxt] < rem:
            rem -= tree[nxt]
            pos = nxt
        bit >>= 1
    return pos + 1


@njit(cache=True, nogil=True)
def count_components(n: int, eu: np.ndarray, ev: np.ndarray) -> int:
    """Number of connected components of the graph on [0, n) with the given
    edge list (one union-find pass)."""
    parent = np.arange(n, dtype=np.int64)
    comp = n
    for i in range(eu.shape[0]):
        ru = uf_find(parent, eu[i])
        rv = uf_find(parent, ev[i])
        if ru != rv:
            parent[rv] = ru
            comp -= 1
    return comp


# ---------------------------------------------------------------------------
# Tracker
# ---------------------------------------------------------------------------


class ComponentTracker:
    """Disjoint sets over vertices [0, n) with component-size accounting.

    Maintains the sizes of the largest and second-largest components after
    every merge.  The second-largest equals the largest when two or more
    components share the top size, and 0 once a single component remains.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need at least one vertex, got n={n}")
        self._n = n
        self._parent = np.arange(n, dtype=np.int64)
        self._size = np.ones(n, dtype=np.int64)
        self._counts = np.zeros(n + 1, dtype=np.int64)
        self._counts[1] = n
        self._tree = np.zeros(n + 1, dtype=np.int64)
        fenwick_add(self._tree, 1, n)
        self._num_components = n
        self._largest = 1
        self._second = 1 if n >= 2 else 0

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_components(self) -> int:
        return self._num_components

    def find(self, v: int) -> int:
        if not 0 <= v < self._n:
            raise IndexError(f"vertex {v} out of range [0, {self._n})")
        return int(uf_find(self._parent, v))

    def component_size(self, v: int) -> int:
        return int(self._size[self.find(v)])

    def merge(self, u: int, v: int) -> bool:
        """Union the components of u and v.  Returns True iff they were
        distinct (a real merge happened)."""
        ru = self.find(u)
        rv = self.find(v)
        if ru == rv:
            return False
        size = self._size
        # larger component keeps its root; ties keep the smaller root index
        if size[ru] < size[rv] or (size[ru] == size[rv] and rv < ru):
            ru, rv = rv, ru
        sa = int(size[ru])
        sb = int(size[rv])
        self._parent[rv] = ru
        size[ru] = sa + sb

        counts, tree = self._counts, self._tree
        counts[sa] -= 1
        counts[sb] -= 1
        counts[sa + sb] += 1
        fenwick_add(tree, sa, -1)
        fenwick_add(tree, sb, -1)
        fenwick_add(tree, sa + sb, 1)
        self._num_components -= 1

        if sa + sb > self._largest:
            self._largest = sa + sb
        if self._num_components == 1:
            self._second = 0
        elif counts[self._largest] >= 2:
            self._second = self._largest
        else:
            # largest occupied size strictly below the leader
            self._second = int(
                fenwick_select(tree, self._num_components - counts[self._largest])
            )
        return True

    def largest_two(self) -> tuple[int, int]:
        """(largest, second-largest) component sizes, O(1)."""
        return self._largest, self._second

    def component_sizes(self) -> np.ndarray:
        """Sizes of all current components (unordered); mainly for tests."""
        roots = np.array([uf_find(self._parent, v) for v in range(self._n)])
        return self._size[np.unique(roots)]

    def __repr__(self) -> str:
        return (
            f"ComponentTracker(n={self._n}, components={self._num_components}, "
            f"largest_two={self.largest_two()})"
        )
