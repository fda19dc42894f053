"""Orbit pseudo-metrics at finite scale.

ebar_n is the min-cost matching average between two length-n orbit segments;
its limit superior over a checkpoint schedule is the mean orbital
pseudo-metric estimate.  Besicovitch averages match times identically, Weyl
profiles take the worst window anywhere in time, and the threshold count
delta_n feeds the sandwich inequalities tying matched averages to matching
cardinalities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matching
from . import systems as _systems
from .errors import SizeLimitError
from .measures import Schedule, _w1_circle, _w1_line

# exact assignment is O(n^3); beyond this the closed-form routes are the only ones
ASSIGNMENT_CAP = 2000

# dense cost matrices for threshold matching stay manageable up to here
THRESHOLD_CAP = 4096

_FAST_GEOMETRIES = (_systems.GEOMETRY_CIRCLE, _systems.GEOMETRY_LINE,
                    _systems.GEOMETRY_SHIFT)


@dataclass(frozen=True)
class TailEstimate:
    """Checkpoint values of a limsup-type quantity plus its tail statistics."""

    schedule: Schedule
    values: tuple[float, ...]
    tail_sup: float
    tail_last: float

    def rows(self) -> list[tuple[int, float]]:
        return list(zip(self.schedule.checkpoints, self.values))


@dataclass(frozen=True)
class WeylProfile:
    horizon: int
    window_lengths: tuple[int, ...]
    sup_window_avg: dict[int, float]

    @property
    def sup(self) -> float:
        return max(self.sup_window_avg.values())


@dataclass(frozen=True)
class EtildeEstimate:
    """Grid bracket of the threshold pseudo-metric.

    value is the smallest grid epsilon whose tail exceedance fraction stays
    strictly below it; qualified is False when no grid point works, in which
    case value is the top of the grid.  precision is the grid resolution.
    """

    value: float
    qualified: bool
    precision: float


@dataclass(frozen=True)
class SandwichReport:
    lhs: float
    mid: float
    rhs: float
    holds: bool


def _orbit_key(seg: _systems.OrbitSegment) -> bytes:
    data = seg.data
    if isinstance(data, tuple):
        return _orbit_key(data[0]) + _orbit_key(data[1])
    return np.ascontiguousarray(data).tobytes()


def _ordered_segments(system: _systems.System, x, y, n: int):
    """Orbit segments in a canonical operand order, so swapping x and y
    reproduces the identical computation and ebar_n is exactly symmetric."""
    seg_x = system.orbit_segment(x, n)
    seg_y = system.orbit_segment(y, n)
    if _orbit_key(seg_y) < _orbit_key(seg_x):
        seg_x, seg_y = seg_y, seg_x
    return seg_x, seg_y


def _fast_w1(geometry: str, xs: np.ndarray, ys: np.ndarray) -> float:
    n = len(xs)
    w = np.full(n, 1.0 / n)
    if geometry == _systems.GEOMETRY_CIRCLE:
        return _w1_circle(xs, w, ys, w)
    return _w1_line(xs, w, ys, w)


def _w1_shift_total(system: _systems.System, seg_x: _systems.OrbitSegment,
                    seg_y: _systems.OrbitSegment) -> float:
    """n * W1 between the two window empiricals, by cylinder counting.

    The window metric is an ultrametric, so the transport optimum has the
    closed tree form: every length-k cylinder contributes its occupancy
    imbalance times that level's edge length.  The matching identity makes
    this equal to the minimum assignment total.  All counts are integers and
    all lengths are dyadic, so the accumulation below is exact.
    """
    K = system.horizon
    n = seg_x.length
    dx, dy = seg_x.data, seg_y.data
    enc_x = np.zeros(n, dtype=np.int64)
    enc_y = np.zeros(n, dtype=np.int64)
    total_units = 0  # in units of 2**-K
    for k in range(1, K + 1):
        enc_x = enc_x * 2 + dx[k - 1:k - 1 + n]
        enc_y = enc_y * 2 + dy[k - 1:k - 1 + n]
        both = np.concatenate([enc_x, enc_y])
        _, inverse = np.unique(both, return_inverse=True)
        signs = np.concatenate([np.ones(n), -np.ones(n)])
        imbalance = int(np.abs(np.bincount(inverse, weights=signs)).sum())
        total_units += imbalance << (K - k if k == K else K - k - 1)
    return float(total_units) * 2.0 ** -K


def _resolve_method(system: _systems.System, n: int, method: str) -> str:
    fast_ok = system.geometry in _FAST_GEOMETRIES
    if method == "auto":
        method = "fast" if fast_ok else "assignment"
    if method == "fast":
        if not fast_ok:
            raise ValueError(
                f"no closed-form fast path for geometry {system.geometry!r}")
        return "fast"
    if method == "assignment":
        if n > ASSIGNMENT_CAP:
            hint = ("the fast path (method='fast') has no size limit"
                    if fast_ok else "no fast path exists for this geometry")
            raise SizeLimitError(
                f"assignment path is capped at n={ASSIGNMENT_CAP}; {hint}")
        return "assignment"
    raise ValueError(f"unknown method {method!r}")


def ebar_n(system: _systems.System, x, y, n: int, method: str = "auto") -> float:
    """Best permutation-matched average distance between length-n segments.

    1-D geometries and the shift evaluate it as the Wasserstein-1 distance
    between the two empirical measures (the two quantities are equal for
    every n), which has no size limit; products solve the assignment
    exactly, capped at ASSIGNMENT_CAP.
    """
    route = _resolve_method(system, n, method)
    seg_x, seg_y = _ordered_segments(system, x, y, n)
    if route == "fast":
        if system.geometry == _systems.GEOMETRY_SHIFT:
            return _w1_shift_total(system, seg_x, seg_y) / n
        return _fast_w1(system.geometry, seg_x.data, seg_y.data)
    C = _systems.cost_matrix(seg_x, seg_y)
    _, total = matching.min_cost_assignment(C)
    return total / n


def ebar_estimate(system: _systems.System, x, y, schedule: Schedule,
                  method: str = "auto") -> TailEstimate:
    """ebar_n along the schedule; tail_sup is the mean pseudo-metric estimate."""
    n_max = schedule.max_n
    route = _resolve_method(system, n_max, method)
    seg_x, seg_y = _ordered_segments(system, x, y, n_max)
    values = []
    if route == "fast":
        if system.geometry == _systems.GEOMETRY_SHIFT:
            for n in schedule.checkpoints:
                values.append(_w1_shift_total(
                    system, seg_x.prefix(n), seg_y.prefix(n)) / n)
        else:
            for n in schedule.checkpoints:
                values.append(_fast_w1(system.geometry,
                                       seg_x.data[:n], seg_y.data[:n]))
    else:
        C = _systems.cost_matrix(seg_x, seg_y).entries
        for n in schedule.checkpoints:
            _, total = matching.min_cost_assignment(C[:n, :n])
            values.append(total / n)
    return _tail_estimate(schedule, values)


def _tail_estimate(schedule: Schedule, values: list[float]) -> TailEstimate:
    tail = values[schedule.tail_start:]
    return TailEstimate(schedule, tuple(values), max(tail), values[-1])


def besicovitch_n(system: _systems.System, x, y, n: int) -> float:
    """Time-aligned average orbit distance; an upper bound for ebar_n."""
    seg_x = system.orbit_segment(x, n)
    seg_y = system.orbit_segment(y, n)
    return float(_systems.aligned_distances(system, seg_x, seg_y).mean())


def besicovitch_estimate(system: _systems.System, x, y,
                         schedule: Schedule) -> TailEstimate:
    n_max = schedule.max_n
    seg_x = system.orbit_segment(x, n_max)
    seg_y = system.orbit_segment(y, n_max)
    dists = _systems.aligned_distances(system, seg_x, seg_y)
    csum = np.concatenate([[0.0], np.cumsum(dists)])
    values = [float(csum[n]) / n for n in schedule.checkpoints]
    return _tail_estimate(schedule, values)


def weyl_profile(system: _systems.System, x, y, horizon: int,
                 window_lengths) -> WeylProfile:
    """Worst window average of aligned distances, per window length.

    sup_window_avg[l] maximizes over all start positions m with
    m + l <= horizon; prefix windows are included, so each value dominates
    the Besicovitch average at the same length.
    """
    lengths = tuple(int(l) for l in window_lengths)
    if len(lengths) == 0:
        raise ValueError("need at least one window length")
    if any(l < 1 for l in lengths):
        raise ValueError("window lengths must be >= 1")
    if max(lengths) > horizon:
        raise ValueError("window length exceeds horizon")
    seg_x = system.orbit_segment(x, horizon)
    seg_y = system.orbit_segment(y, horizon)
    dists = _systems.aligned_distances(system, seg_x, seg_y)
    csum = np.concatenate([[0.0], np.cumsum(dists)])
    sup = {l: float((csum[l:] - csum[:-l]).max()) / l for l in lengths}
    return WeylProfile(horizon, lengths, sup)


def delta_n(system: _systems.System, x, y, n: int, delta: float) -> int:
    """Minimum number of matched pairs forced above distance delta.

    Equals n minus the maximum matching on pairs within delta.  Needs the
    dense cost matrix, so n is capped at THRESHOLD_CAP.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if n > THRESHOLD_CAP:
        raise SizeLimitError(f"threshold matching is capped at n={THRESHOLD_CAP}")
    seg_x, seg_y = _ordered_segments(system, x, y, n)
    C = _systems.cost_matrix(seg_x, seg_y)
    if (np.diagonal(C.entries) <= delta).all():
        return 0
    return n - matching.max_matching_under_threshold(C, delta)


def etilde_estimate(system: _systems.System, x, y, schedule: Schedule,
                    eps_grid) -> EtildeEstimate:
    """Smallest grid epsilon with tail exceedance fraction strictly below it.

    The fraction delta_n/n is nonincreasing in epsilon while the right side
    grows, so the qualifying grid points form a suffix and a binary search
    over the grid suffices.
    """
    grid = [float(e) for e in eps_grid]
    if len(grid) == 0:
        raise ValueError("epsilon grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("epsilon grid must be strictly increasing")
    if grid[0] <= 0 or grid[-1] > system.diameter + 1e-12:
        raise ValueError("epsilon grid must lie in (0, diameter]")

    tail = schedule.tail_checkpoints

    def qualifies(eps: float) -> bool:
        worst = max(delta_n(system, x, y, n, eps) / n for n in tail)
        return worst < eps

    precision = max(np.diff(grid)) if len(grid) > 1 else grid[0]
    if not qualifies(grid[-1]):
        return EtildeEstimate(grid[-1], False, float(precision))
    lo, hi = -1, len(grid) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if qualifies(grid[mid]):
            hi = mid
        else:
            lo = mid
    return EtildeEstimate(grid[hi], True, float(precision))


def sandwich_check(system: _systems.System, x, y, n: int,
                   delta: float) -> SandwichReport:
    """delta*Delta_n <= n*ebar_n <= Delta_n*diam + delta*(n - Delta_n).

    All three numbers are evaluated on the same cost matrix; the middle term
    is the raw assignment total, not a rounded-back average.
    """
    if n > ASSIGNMENT_CAP:
        raise SizeLimitError(f"sandwich check needs assignment, capped at {ASSIGNMENT_CAP}")
    seg_x, seg_y = _ordered_segments(system, x, y, n)
    C = _systems.cost_matrix(seg_x, seg_y)
    _, mid = matching.min_cost_assignment(C)
    dn = n - matching.max_matching_under_threshold(C, delta)
    lhs = delta * dn
    rhs = dn * system.diameter + delta * (n - dn)
    slack = 1e-12 * max(1.0, n)
    return SandwichReport(lhs, mid, rhs, lhs <= mid + slack and mid <= rhs + slack)
