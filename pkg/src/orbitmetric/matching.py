"""Exact combinatorial solvers on square cost matrices.

``min_cost_assignment`` is a shortest-augmenting-path scheme with dual
potentials (O(n^3), inner scans vectorized), ``brute_force_assignment`` is
the independent enumeration oracle for small n, ``max_matching_under_threshold``
runs Hopcroft-Karp on the admissible-edge graph, and ``birkhoff_decompose``
peels a bistochastic matrix into a convex combination of permutations.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailureError, NotBistochasticError, SizeLimitError

BRUTE_FORCE_LIMIT = 9

# row/column sums of a bistochastic matrix may be off by this much
BISTOCHASTIC_TOL = 1e-6

# residual entries below this are zeroed between peeling rounds
PEEL_CLAMP = 1e-9


@dataclass(frozen=True)
class Permutation:
    """Bijection of {0, ..., n-1} stored as the image tuple."""

    mapping: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise ValueError("mapping is not a bijection of 0..n-1")

    @property
    def n(self) -> int:
        return len(self.mapping)

    def matrix(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        P[np.arange(self.n), list(self.mapping)] = 1.0
        return P


@dataclass(frozen=True)
class ConvexDecomposition:
    """Weights and permutations with sum(w_k * P_k) equal to the input."""

    weights: tuple[float, ...]
    permutations: tuple[Permutation, ...]

    def reconstruct(self) -> np.ndarray:
        n = self.permutations[0].n
        out = np.zeros((n, n))
        for w, p in zip(self.weights, self.permutations):
            out[np.arange(n), list(p.mapping)] += w
        return out


def _cost_entries(cost) -> np.ndarray:
    entries = cost.entries if hasattr(cost, "entries") else np.asarray(cost, dtype=np.float64)
    entries = np.asarray(entries, dtype=np.float64)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError("cost matrix must be square")
    if entries.shape[0] == 0:
        raise ValueError("cost matrix must be non-empty")
    if not np.isfinite(entries).all():
        raise ValueError("cost entries must be finite")
    if (entries < 0).any():
        raise ValueError("cost entries must be non-negative")
    return entries


def min_cost_assignment(cost) -> tuple[Permutation, float]:
    """Exact minimum-cost perfect assignment and its total cost.

    Maintains dual potentials u, v and grows one shortest augmenting path
    per row; column scans are vectorized, so the work is O(n^2) vector
    operations in the worst case.  Any cost ties are broken by argmin order,
    which keeps the result deterministic.
    """
    C = _cost_entries(cost)
    n = C.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # p[j] = row assigned to column j, 1-based with 0 sentinels
    p = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        # dist holds absolute path lengths; duals are settled once per row,
        # which keeps the inner loop to one scan and one argmin per step
        dist = np.full(n + 1, np.inf)
        way = np.zeros(n + 1, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        reached = 0.0
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = reached + C[i0 - 1] - u[i0] - v[1:]
            tail = dist[1:]
            better = free & (cur < tail)
            tail[better] = cur[better]
            way[1:][better] = j0
            reachable = np.where(free, tail, np.inf)
            j1 = int(np.argmin(reachable)) + 1
            reached = reachable[j1 - 1]
            j0 = j1
            if p[j0] == 0:
                break
        settled = np.flatnonzero(used[1:]) + 1
        u[p[settled]] += reached - dist[settled]
        v[settled] -= reached - dist[settled]
        u[i] += reached
        while j0:
            j1 = int(way[j0])
            p[j0] = p[j1]
            j0 = j1
    perm = np.empty(n, dtype=np.int64)
    perm[p[1:] - 1] = np.arange(n)
    total = float(C[np.arange(n), perm].sum())
    return Permutation(tuple(int(j) for j in perm)), total


def brute_force_assignment(cost) -> tuple[Permutation, float]:
    """Assignment oracle by full enumeration of permutations (n <= 9)."""
    C = _cost_entries(cost)
    n = C.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"enumeration oracle is limited to n <= {BRUTE_FORCE_LIMIT}")
    rows = range(n)
    best_perm = None
    best = np.inf
    for sigma in itertools.permutations(range(n)):
        total = sum(C[i, sigma[i]] for i in rows)
        if total < best:
            best = total
            best_perm = sigma
    return Permutation(best_perm), float(best)


def _hopcroft_karp(adj: list[list[int]], n_left: int, n_right: int) -> tuple[int, list[int]]:
    """Maximum bipartite matching size plus the left-to-right match array.

    Phased BFS/DFS (Hopcroft-Karp).  The DFS is iterative so deep augmenting
    paths cannot hit the recursion limit.
    """
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left
    size = 0
    while True:
        queue = deque()
        for i in range(n_left):
            if match_l[i] == -1:
                dist[i] = 0
                queue.append(i)
            else:
                dist[i] = INF
        found = False
        while queue:
            i = queue.popleft()
            for j in adj[i]:
                k = match_r[j]
                if k == -1:
                    found = True
                elif dist[k] == INF:
                    dist[k] = dist[i] + 1
                    queue.append(k)
        if not found:
            return size, match_l
        for start in range(n_left):
            if match_l[start] != -1:
                continue
            # stack holds (left node, open column iterator); via[t] is the
            # column used to descend from stack[t] to stack[t+1]
            stack = [(start, iter(adj[start]))]
            via: list[int] = []
            while stack:
                i, it = stack[-1]
                advanced = False
                for j in it:
                    k = match_r[j]
                    if k == -1:
                        via.append(j)
                        for (node, _), col in zip(stack, via):
                            match_l[node] = col
                            match_r[col] = node
                        size += 1
                        stack = []
                        advanced = True
                        break
                    if dist[k] == dist[i] + 1:
                        via.append(j)
                        stack.append((k, iter(adj[k])))
                        advanced = True
                        break
                if not advanced:
                    # only a vertex whose whole subtree failed goes dead;
                    # levels must stay readable while it sits on the stack
                    dist[i] = INF
                    stack.pop()
                    if via:
                        via.pop()


def max_matching_under_threshold(cost, delta: float) -> int:
    """Size of a maximum matching on pairs with cost <= delta."""
    C = _cost_entries(cost)
    if delta < 0:
        raise ValueError("threshold must be non-negative")
    n = C.shape[0]
    mask = C <= delta
    adj = [np.flatnonzero(mask[i]).tolist() for i in range(n)]
    size, _ = _hopcroft_karp(adj, n, n)
    return size


def _support_perfect_matching(mask: np.ndarray) -> list[int] | None:
    n = mask.shape[0]
    adj = [np.flatnonzero(mask[i]).tolist() for i in range(n)]
    size, match_l = _hopcroft_karp(adj, n, n)
    if size < n:
        return None
    return match_l


def birkhoff_decompose(matrix) -> ConvexDecomposition:
    """Split a bistochastic matrix into a convex combination of permutations.

    Each round finds a perfect matching on the support of the residual,
    subtracts the minimum matched entry times that permutation, and zeroes
    entries below PEEL_CLAMP to stop float dust from accumulating.  The
    number of terms is at most (n-1)^2 + 1.
    """
    B = np.array(matrix, dtype=np.float64)
    if B.ndim != 2 or B.shape[0] != B.shape[1] or B.shape[0] == 0:
        raise ValueError("matrix must be square and non-empty")
    if (B < -BISTOCHASTIC_TOL).any():
        raise NotBistochasticError("matrix has negative entries")
    n = B.shape[0]
    if np.abs(B.sum(axis=1) - 1.0).max() > BISTOCHASTIC_TOL:
        raise NotBistochasticError("row sums are not 1 within tolerance")
    if np.abs(B.sum(axis=0) - 1.0).max() > BISTOCHASTIC_TOL:
        raise NotBistochasticError("column sums are not 1 within tolerance")
    R = np.clip(B, 0.0, None)
    weights: list[float] = []
    perms: list[Permutation] = []
    max_rounds = (n - 1) ** 2 + 1
    for _ in range(max_rounds + 1):
        R[R < PEEL_CLAMP] = 0.0
        if not R.any():
            break
        match = _support_perfect_matching(R > 0.0)
        if match is None:
            raise DecompositionFailureError(
                "residual support admits no perfect matching")
        rows = np.arange(n)
        cols = np.asarray(match)
        w = float(R[rows, cols].min())
        weights.append(w)
        perms.append(Permutation(tuple(int(c) for c in cols)))
        R[rows, cols] -= w
    else:
        raise DecompositionFailureError("peeling did not terminate in the term bound")
    return ConvexDecomposition(tuple(weights), tuple(perms))
