"""Discrete measures on orbit state spaces and the distances between them.

The measures here are finitely supported probability measures whose atoms
are system states (numbers, symbol windows, or pairs).  Three distances are
provided: exact Wasserstein-1 via the transportation linear program, exact
closed-form Wasserstein-1 for one-dimensional geometries, and the exact
one-sided Prokhorov metric via max-flow feasibility over the finitely many
candidate intervals between pairwise distances.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import SizeLimitError
from . import systems as _systems

ORACLE_SUPPORT_LIMIT = 12

WEIGHT_SUM_TOL = 1e-12

# residual capacities below this are treated as exhausted in max-flow
_FLOW_EPS = 1e-15


# ---------------------------------------------------------------------------
# measures and schedules


class DiscreteMeasure:
    """Finitely supported probability measure.

    Atoms are kept sorted and pairwise distinct (exactly equal atoms are
    merged on construction); weights are non-negative and sum to one within
    WEIGHT_SUM_TOL.  Instances are immutable by convention.
    """

    __slots__ = ("atoms", "weights")

    def __init__(self, atoms, weights) -> None:
        weights = np.asarray(weights, dtype=np.float64)
        atoms = list(atoms)
        if len(atoms) != len(weights):
            raise ValueError("atoms and weights must have equal length")
        if len(atoms) == 0:
            raise ValueError("measure needs at least one atom")
        if (weights < -1e-15).any():
            raise ValueError("weights must be non-negative")
        if abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")
        merged: dict = {}
        for a, w in zip(atoms, weights):
            key = float(a) if isinstance(a, (int, float, np.floating)) else a
            merged[key] = merged.get(key, 0.0) + float(w)
        order = sorted(merged)
        self.atoms = tuple(order)
        self.weights = np.asarray([merged[a] for a in order], dtype=np.float64)

    @classmethod
    def dirac(cls, atom) -> "DiscreteMeasure":
        return cls([atom], [1.0])

    @property
    def support_size(self) -> int:
        return len(self.atoms)

    def to_dict(self) -> dict:
        return {"atoms": [_atom_jsonable(a) for a in self.atoms],
                "weights": [float(w) for w in self.weights]}

    def __repr__(self) -> str:
        return f"DiscreteMeasure({self.support_size} atoms)"


def _atom_jsonable(atom):
    if isinstance(atom, tuple):
        if all(isinstance(s, (int, np.integer)) for s in atom):
            return "".join(str(int(s)) for s in atom)
        return [_atom_jsonable(a) for a in atom]
    return float(atom)


@dataclass(frozen=True)
class MeasureSet:
    """A finite family of measures, e.g. estimated orbit limit measures."""

    members: tuple

    def __post_init__(self) -> None:
        if len(self.members) == 0:
            raise ValueError("measure set must be non-empty")


@dataclass(frozen=True)
class Schedule:
    """Increasing orbit-length checkpoints plus the index where the tail starts."""

    checkpoints: tuple[int, ...]
    tail_start: int = 0

    def __post_init__(self) -> None:
        cps = self.checkpoints
        if len(cps) == 0:
            raise ValueError("schedule needs at least one checkpoint")
        if cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly increasing and >= 1")
        if not 0 <= self.tail_start < len(cps):
            raise ValueError("tail_start must index a checkpoint")

    @classmethod
    def geometric(cls, max_n: int, ratio: float = 1.5, tail: int = 5) -> "Schedule":
        """Checkpoints round(ratio**k) up to max_n, tail at the last ``tail``."""
        if max_n < 1:
            raise ValueError("max_n must be at least 1")
        vals = set()
        k = 0
        while True:
            v = round(ratio ** k)
            if v > max_n:
                break
            vals.add(max(1, v))
            k += 1
        vals.add(max_n)
        cps = tuple(sorted(vals))
        return cls(cps, max(0, len(cps) - tail))

    @property
    def max_n(self) -> int:
        return self.checkpoints[-1]

    @property
    def tail_checkpoints(self) -> tuple[int, ...]:
        return self.checkpoints[self.tail_start:]


def empirical_measure(seg: _systems.OrbitSegment) -> DiscreteMeasure:
    """Uniform measure on the first ``length`` orbit states, equal states merged.

    Shift states are merged iff their horizon-length windows agree, which is
    exactly distance zero under the truncated metric.
    """
    system = seg.system
    n = seg.length
    if system.geometry == _systems.GEOMETRY_SHIFT:
        K = system.horizon
        windows = np.lib.stride_tricks.sliding_window_view(seg.data, K)[:n]
        counts = Counter(tuple(int(s) for s in w) for w in windows)
        atoms = sorted(counts)
        return DiscreteMeasure(atoms, [counts[a] / n for a in atoms])
    if system.geometry == _systems.GEOMETRY_PRODUCT:
        counts = Counter(seg.point(k) for k in range(n))
        atoms = sorted(counts)
        return DiscreteMeasure(atoms, [counts[a] / n for a in atoms])
    values, counts = np.unique(np.asarray(seg.data, dtype=np.float64),
                               return_counts=True)
    return DiscreteMeasure([float(v) for v in values], counts / n)


# ---------------------------------------------------------------------------
# Wasserstein-1


def wasserstein1(mu: DiscreteMeasure, nu: DiscreteMeasure,
                 system: _systems.System) -> float:
    """Exact Wasserstein-1 via the transportation linear program.

    Supplies are mu's weights, demands nu's, and the cost of moving one unit
    from atom i to atom j is their ground distance.  Solved with the HiGHS
    simplex through scipy, which returns a vertex-exact optimum.
    """
    D = system.pairwise_dist(mu.atoms, nu.atoms)
    m, n = D.shape
    if m == 1:
        return float(D[0] @ nu.weights)
    if n == 1:
        return float(D[:, 0] @ mu.weights)
    nvar = m * n
    rows = np.concatenate([np.arange(nvar) // n, m + np.arange(nvar) % n])
    cols = np.concatenate([np.arange(nvar), np.arange(nvar)])
    A = sparse.coo_matrix((np.ones(2 * nvar), (rows, cols)), shape=(m + n, nvar))
    b = np.concatenate([mu.weights, nu.weights])
    res = linprog(D.ravel(), A_eq=A.tocsr(), b_eq=b, bounds=(0, None),
                  method="highs")
    if not res.success:
        raise RuntimeError(f"transportation solve failed: {res.message}")
    return float(res.fun)


def wasserstein1_fast_1d(mu: DiscreteMeasure, nu: DiscreteMeasure,
                         geometry: str) -> float:
    """Closed-form Wasserstein-1 on the line or circle.

    Line: integral of |F_mu - F_nu| between consecutive support points.
    Circle: min over c of the integral of |F_mu - F_nu - c|, minimized by a
    length-weighted median of the CDF difference; ground metric is the arc
    distance, so values agree with the transportation program exactly.
    """
    u = np.asarray(mu.atoms, dtype=np.float64)
    v = np.asarray(nu.atoms, dtype=np.float64)
    if u.ndim != 1 or v.ndim != 1:
        raise ValueError("fast path needs scalar atoms")
    if geometry == _systems.GEOMETRY_LINE:
        return _w1_line(u, mu.weights, v, nu.weights)
    if geometry == _systems.GEOMETRY_CIRCLE:
        return _w1_circle(u, mu.weights, v, nu.weights)
    raise ValueError(f"no one-dimensional fast path for geometry {geometry!r}")


def _w1_line(u: np.ndarray, uw: np.ndarray, v: np.ndarray, vw: np.ndarray) -> float:
    pts = np.concatenate([u, v])
    signed = np.concatenate([uw, -vw])
    order = np.argsort(pts, kind="stable")
    pts = pts[order]
    cdf_diff = np.cumsum(signed[order])[:-1]
    return float(np.abs(cdf_diff) @ np.diff(pts))


def _w1_circle(u: np.ndarray, uw: np.ndarray, v: np.ndarray, vw: np.ndarray) -> float:
    if (u < 0).any() or (u >= 1).any() or (v < 0).any() or (v >= 1).any():
        raise ValueError("circle atoms must lie in [0, 1)")
    pts = np.concatenate([u, v])
    signed = np.concatenate([uw, -vw])
    order = np.argsort(pts, kind="stable")
    pts = pts[order]
    g = np.cumsum(signed[order])
    lengths = np.empty_like(pts)
    lengths[:-1] = np.diff(pts)
    lengths[-1] = 1.0 - pts[-1] + pts[0]  # wrap segment, g there is ~0
    shift = _weighted_median(g, lengths)
    return float(np.abs(g - shift) @ lengths)


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    half = 0.5 * cum[-1]
    idx = int(np.searchsorted(cum, half))
    return float(values[order][min(idx, len(values) - 1)])


# ---------------------------------------------------------------------------
# Prokhorov


def prokhorov(mu: DiscreteMeasure, nu: DiscreteMeasure,
              system: _systems.System) -> float:
    """One-sided Prokhorov distance, computed exactly.

    inf { eps > 0 : mu(B) <= nu(B^eps) + eps for every B }, with the open
    eps-hull.  The admissible-edge graph changes only at pairwise support
    distances, and on each interval between breakpoints the worst deficiency
    sup_B (mu(B) - nu(B^eps)) equals 1 minus a max-flow value, so the exact
    infimum is found by a monotone search over the intervals.
    """
    D = system.pairwise_dist(mu.atoms, nu.atoms)
    return _prokhorov_from_dist(D, mu.weights, nu.weights)


def _prokhorov_from_dist(D: np.ndarray, wa: np.ndarray, wb: np.ndarray) -> float:
    lefts = np.unique(np.concatenate([[0.0], D.ravel()]))
    n_iv = len(lefts)

    deficiency_cache: dict[int, float] = {}

    def deficiency(k: int) -> float:
        if k not in deficiency_cache:
            rows, cols = np.nonzero(D <= lefts[k])
            flow = _max_flow_bipartite(wa, wb, rows, cols)
            deficiency_cache[k] = 1.0 - flow
        return deficiency_cache[k]

    def feasible(k: int) -> bool:
        right = lefts[k + 1] if k + 1 < n_iv else np.inf
        return deficiency(k) <= right

    # deficiency is non-increasing and interval right ends increase, so the
    # feasible intervals form a suffix; find its first index
    if feasible(0):
        k0 = 0
    else:
        lo, hi = 0, 1
        while hi < n_iv - 1 and not feasible(hi):
            lo = hi
            hi = min(2 * hi, n_iv - 1)
        # invariant: feasible(hi) (the last interval always is), not feasible(lo)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        k0 = hi
    return max(float(lefts[k0]), deficiency(k0), 0.0)


def _max_flow_bipartite(wa: np.ndarray, wb: np.ndarray,
                        rows: np.ndarray, cols: np.ndarray) -> float:
    """Max flow from supplies ``wa`` to demands ``wb`` along admissible pairs.

    Dinic's algorithm on the 4-layer network; interior arcs get capacity 2,
    which no feasible flow can saturate since total supply is 1.
    """
    m, n = len(wa), len(wb)
    src, snk = 0, 1 + m + n
    adj: list[list[int]] = [[] for _ in range(m + n + 2)]
    to: list[int] = []
    cap: list[float] = []

    def add_edge(a: int, b: int, c: float) -> None:
        adj[a].append(len(to)); to.append(b); cap.append(c)
        adj[b].append(len(to)); to.append(a); cap.append(0.0)

    for i in range(m):
        add_edge(src, 1 + i, float(wa[i]))
    for j in range(n):
        add_edge(1 + m + j, snk, float(wb[j]))
    for i, j in zip(rows.tolist(), cols.tolist()):
        add_edge(1 + i, 1 + m + j, 2.0)

    total = 0.0
    while True:
        level = [-1] * len(adj)
        level[src] = 0
        queue = [src]
        for node in queue:
            for e in adj[node]:
                if cap[e] > _FLOW_EPS and level[to[e]] < 0:
                    level[to[e]] = level[node] + 1
                    queue.append(to[e])
        if level[snk] < 0:
            return total
        ptr = [0] * len(adj)
        while True:
            pushed = _dinic_dfs(src, snk, np.inf, adj, to, cap, level, ptr)
            if pushed <= 0.0:
                break
            total += pushed


def _dinic_dfs(node: int, snk: int, limit: float, adj, to, cap, level, ptr) -> float:
    # iterative blocking-flow step along the level graph
    stack = [(node, limit)]
    path: list[int] = []
    while stack:
        cur, lim = stack[-1]
        if cur == snk:
            for e in path:
                cap[e] -= lim
                cap[e ^ 1] += lim
            return lim
        advanced = False
        while ptr[cur] < len(adj[cur]):
            e = adj[cur][ptr[cur]]
            nxt = to[e]
            if cap[e] > _FLOW_EPS and level[nxt] == level[cur] + 1:
                stack.append((nxt, min(lim, cap[e])))
                path.append(e)
                advanced = True
                break
            ptr[cur] += 1
        if not advanced:
            level[cur] = -1
            stack.pop()
            if path:
                path.pop()
    return 0.0


def prokhorov_oracle(mu: DiscreteMeasure, nu: DiscreteMeasure,
                     system: _systems.System) -> float:
    """Prokhorov by enumeration of all subsets of mu's support (<= 12 atoms).

    For each subset B the least feasible eps solves
    eps >= mu(B) - nu(B^eps) with nu(B^eps) a step function of eps; the
    answer is the maximum over subsets.  Independent of the flow solver.
    """
    m = mu.support_size
    if m > ORACLE_SUPPORT_LIMIT:
        raise SizeLimitError(
            f"subset oracle is limited to {ORACLE_SUPPORT_LIMIT} support atoms")
    D = system.pairwise_dist(mu.atoms, nu.atoms)
    wa, wb = mu.weights, nu.weights
    best = 0.0
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if mask >> i & 1]
        mass = float(wa[idx].sum())
        dj = D[idx].min(axis=0)
        best = max(best, _least_feasible_eps(mass, dj, wb))
    return best


def _least_feasible_eps(mass: float, dj: np.ndarray, wb: np.ndarray) -> float:
    """inf { eps : mass <= sum of wb over {dj < eps} + eps }, literal scan."""
    lefts = np.unique(np.concatenate([[0.0], dj]))
    for k, left in enumerate(lefts):
        right = lefts[k + 1] if k + 1 < len(lefts) else np.inf
        covered = float(wb[dj <= left].sum())
        need = mass - covered
        if need <= right:
            return max(float(left), need, 0.0)
    raise AssertionError("final interval is always feasible")


# ---------------------------------------------------------------------------
# sets of measures


def hausdorff_measures(a, b, system: _systems.System) -> float:
    """Hausdorff distance between two finite measure families under Prokhorov."""
    members_a = a.members if isinstance(a, MeasureSet) else tuple(a)
    members_b = b.members if isinstance(b, MeasureSet) else tuple(b)
    if not members_a or not members_b:
        raise ValueError("measure families must be non-empty")
    R = np.array([[prokhorov(x, y, system) for y in members_b] for x in members_a])
    return float(max(R.min(axis=1).max(), R.min(axis=0).max()))


def omega_hat_estimate(system: _systems.System, x, schedule: Schedule,
                       cluster_tol: float = 0.05) -> MeasureSet:
    """Representatives of the orbit's tail empirical measures.

    Computes the empirical measure at each tail checkpoint and greedily
    clusters them under the Prokhorov metric with radius ``cluster_tol``;
    the first member of each cluster is its representative.
    """
    if cluster_tol < 0:
        raise ValueError("cluster tolerance must be non-negative")
    seg = system.orbit_segment(x, schedule.max_n)
    reps: list[DiscreteMeasure] = []
    for n in schedule.tail_checkpoints:
        meas = empirical_measure(seg.prefix(n))
        if not any(prokhorov(meas, rep, system) <= cluster_tol for rep in reps):
            reps.append(meas)
    return MeasureSet(tuple(reps))
