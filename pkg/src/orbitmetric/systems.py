"""Concrete dynamical systems: state spaces, ground metrics, orbit segments.

Systems on offer:

* ``CircleRotation(alpha)``, arc metric ``min(|x-y|, 1-|x-y|)``, diameter 1/2.
* ``DoublingMap``, ``TentMap``, ``LogisticMap(r)`` on the unit interval with
  metric ``|x-y|``, diameter 1.
* ``BinaryShift(horizon)``, the full one-sided shift on two symbols with the
  first-disagreement metric ``2**-k`` truncated below ``2**-horizon``.
* ``product_system(a, b)`` with the max metric on pairs.

Orbit states are generated as exactly as double precision permits: rotations
use integer arithmetic on dyadic rationals (no accumulated drift), doubling
and tent accept ``fractions.Fraction`` bases for exact rational orbits, and
shifts are exact by construction.  The logistic map is iterated in plain
double precision; its orbits are shadowing-free approximations and any
diagnostic built on them is qualitative by nature.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientTailError

DEFAULT_HORIZON = 30

GEOMETRY_CIRCLE = "circle"
GEOMETRY_LINE = "line"
GEOMETRY_SHIFT = "shift"
GEOMETRY_PRODUCT = "product"


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class ShiftPoint:
    """One-sided binary sequence stored as a finite prefix plus periodic tail.

    ``tail`` is repeated forever after the prefix, so every index has a
    deterministic symbol.  ``tail=None`` marks a point with no continuation
    rule; asking for symbols past the prefix then raises
    ``InsufficientTailError``.
    """

    prefix: tuple[int, ...] = ()
    tail: tuple[int, ...] | None = (0,)

    def __post_init__(self) -> None:
        if any(s not in (0, 1) for s in self.prefix):
            raise ValueError("shift symbols must be 0 or 1")
        if self.tail is not None:
            if len(self.tail) == 0:
                raise ValueError("periodic tail must be non-empty (or None)")
            if any(s not in (0, 1) for s in self.tail):
                raise ValueError("shift symbols must be 0 or 1")

    @classmethod
    def zeros(cls) -> "ShiftPoint":
        return cls((), (0,))

    @classmethod
    def ones(cls) -> "ShiftPoint":
        return cls((), (1,))

    @classmethod
    def from_string(cls, prefix: str, tail: str | None = None) -> "ShiftPoint":
        """Parse '0'/'1' strings; default tail repeats the last prefix symbol."""
        pref = tuple(int(c) for c in prefix)
        if tail is None:
            t = (pref[-1],) if pref else (0,)
        elif tail == "":
            t = None
        else:
            t = tuple(int(c) for c in tail)
        return cls(pref, t)

    def symbol(self, k: int) -> int:
        if k < 0:
            raise ValueError("symbol index must be non-negative")
        if k < len(self.prefix):
            return self.prefix[k]
        if self.tail is None:
            raise InsufficientTailError(
                f"point defines {len(self.prefix)} symbols, index {k} requested"
            )
        return self.tail[(k - len(self.prefix)) % len(self.tail)]

    def symbols(self, count: int) -> np.ndarray:
        """First ``count`` symbols as a uint8 array."""
        if count <= len(self.prefix):
            return np.asarray(self.prefix[:count], dtype=np.uint8)
        if self.tail is None:
            raise InsufficientTailError(
                f"point defines {len(self.prefix)} symbols, {count} requested"
            )
        reps = -(-(count - len(self.prefix)) // len(self.tail))
        full = self.prefix + self.tail * reps
        return np.asarray(full[:count], dtype=np.uint8)

    def __str__(self) -> str:
        pref = "".join(str(s) for s in self.prefix)
        if self.tail is None:
            return pref or "(empty)"
        return pref + "(" + "".join(str(s) for s in self.tail) + ")*"


def _shift_symbols(point, count: int) -> np.ndarray:
    """Symbols of a shift point given as ShiftPoint, str, or int sequence."""
    if isinstance(point, ShiftPoint):
        return point.symbols(count)
    if isinstance(point, str):
        return ShiftPoint.from_string(point).symbols(count)
    arr = np.asarray(point, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("shift point must be a one-dimensional symbol sequence")
    if len(arr) < count:
        raise InsufficientTailError(
            f"finite symbol window of length {len(arr)} cannot supply {count} symbols"
        )
    return arr[:count]


def _as_unit_scalar(p, closed_right: bool = False):
    """Validate a point of a one-dimensional system; Fractions pass through."""
    if isinstance(p, Fraction):
        v = p
    elif isinstance(p, (int, float, np.floating, np.integer)):
        v = float(p)
        if math.isnan(v) or math.isinf(v):
            raise ValueError("point must be finite")
    else:
        raise ValueError(f"expected a number in the unit interval, got {type(p).__name__}")
    hi_ok = v <= 1 if closed_right else v < 1
    if not (0 <= v and hi_ok):
        raise ValueError(f"point {p!r} outside the unit interval")
    return v


# ---------------------------------------------------------------------------
# orbit segments


@dataclass(frozen=True)
class OrbitSegment:
    """First ``length`` states of an orbit, stored in bulk form.

    ``data`` holds a float array of positions for one-dimensional systems, a
    symbol array of length ``length + horizon`` for shifts (windows are views
    into it), and a pair of factor segments for products.
    """

    system: "System"
    base: object
    length: int
    data: object

    def point(self, k: int):
        if not 0 <= k < self.length:
            raise ValueError(f"orbit index {k} out of range [0, {self.length})")
        return self.system._segment_point(self, k)

    def points(self) -> list:
        return [self.point(k) for k in range(self.length)]

    def prefix(self, m: int) -> "OrbitSegment":
        """View of the first ``m`` states; shares the underlying arrays."""
        if not 1 <= m <= self.length:
            raise ValueError(f"prefix length {m} out of range [1, {self.length}]")
        if m == self.length:
            return self
        return OrbitSegment(self.system, self.base, m,
                            self.system._prefix_data(self.data, m))


@dataclass(frozen=True)
class CostMatrix:
    """Pairwise orbit distance matrix ``entries[i][j] = d(T^i x, T^j y)``.

    ``precision_bound`` states the quantization floor of the entries: 0 for
    exact geometries, ``2**-horizon`` for shift windows.
    """

    entries: np.ndarray
    precision_bound: float = 0.0

    @property
    def n(self) -> int:
        return self.entries.shape[0]


# ---------------------------------------------------------------------------
# systems


class System:
    """Common interface: ground metric, one orbit step, bulk orbit segments."""

    kind: str = ""
    geometry: str = ""
    diameter: float = 1.0

    def dist(self, p, q) -> float:
        raise NotImplementedError

    def step(self, p):
        raise NotImplementedError

    def orbit_segment(self, x, n: int) -> OrbitSegment:
        if n < 1:
            raise ValueError("orbit length must be at least 1")
        return self._segment(x, n)

    def pairwise_dist(self, atoms_a, atoms_b) -> np.ndarray:
        """Dense distance matrix between two atom collections."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    # segment plumbing, one implementation per geometry
    def _segment(self, x, n: int) -> OrbitSegment:
        raise NotImplementedError

    def _segment_point(self, seg: OrbitSegment, k: int):
        raise NotImplementedError

    def _prefix_data(self, data, m: int):
        raise NotImplementedError


class _NumericSystem(System):
    """Shared plumbing for systems whose states are numbers in [0, 1]."""

    def _segment(self, x, n: int) -> OrbitSegment:
        return OrbitSegment(self, x, n, self._orbit_array(x, n))

    def _orbit_array(self, x, n: int) -> np.ndarray:
        raise NotImplementedError

    def _segment_point(self, seg: OrbitSegment, k: int) -> float:
        return float(seg.data[k])

    def _prefix_data(self, data, m: int):
        return data[:m]


def _line_dist(p: float, q: float) -> float:
    return abs(p - q)


def _arc_dist(p: float, q: float) -> float:
    d = abs(p - q) % 1.0
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class CircleRotation(_NumericSystem):
    """Rotation x -> x + alpha (mod 1) on the circle with the arc metric."""

    alpha: float = 0.0
    kind = "circle_rotation"
    geometry = GEOMETRY_CIRCLE
    diameter = 0.5

    def __post_init__(self) -> None:
        if not (isinstance(self.alpha, (int, float)) and 0 <= self.alpha < 1):
            raise ValueError("rotation angle must lie in [0, 1)")

    def dist(self, p, q) -> float:
        p = _as_unit_scalar(p)
        q = _as_unit_scalar(q)
        return _arc_dist(float(p), float(q))

    def step(self, p):
        if isinstance(p, Fraction):
            return (p + Fraction(self.alpha)) % 1
        return (float(p) + self.alpha) % 1.0

    def _orbit_array(self, x, n: int) -> np.ndarray:
        x = _as_unit_scalar(x)
        if isinstance(x, Fraction):
            a = Fraction(self.alpha)
            den = math.lcm(x.denominator, a.denominator)
            base, inc = x.numerator * (den // x.denominator), a.numerator * (den // a.denominator)
        else:
            xn, xd = float(x).as_integer_ratio()
            an, ad = float(self.alpha).as_integer_ratio()
            den = max(xd, ad)  # both are powers of two
            base, inc = xn * (den // xd), an * (den // ad)
        out = np.empty(n, dtype=np.float64)
        s = base % den
        for k in range(n):
            out[k] = s / den
            s += inc
            if s >= den:
                s -= den
        return out

    def pairwise_dist(self, atoms_a, atoms_b) -> np.ndarray:
        a = np.asarray(atoms_a, dtype=np.float64)
        b = np.asarray(atoms_b, dtype=np.float64)
        d = np.abs(a[:, None] - b[None, :])
        return np.minimum(d, 1.0 - d)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha}


class _IntervalSystem(_NumericSystem):
    """Interval maps: iterate ``step`` from the base point."""

    geometry = GEOMETRY_LINE
    diameter = 1.0

    def dist(self, p, q) -> float:
        p = _as_unit_scalar(p, closed_right=True)
        q = _as_unit_scalar(q, closed_right=True)
        return _line_dist(float(p), float(q))

    def _orbit_array(self, x, n: int) -> np.ndarray:
        p = _as_unit_scalar(x, closed_right=True)
        out = np.empty(n, dtype=np.float64)
        for k in range(n):
            out[k] = float(p)
            p = self.step(p)
        return out

    def pairwise_dist(self, atoms_a, atoms_b) -> np.ndarray:
        a = np.asarray(atoms_a, dtype=np.float64)
        b = np.asarray(atoms_b, dtype=np.float64)
        return np.abs(a[:, None] - b[None, :])


@dataclass(frozen=True)
class DoublingMap(_IntervalSystem):
    """x -> 2x (mod 1).  Fraction bases are iterated exactly."""

    kind = "doubling_map"

    def step(self, p):
        if isinstance(p, Fraction):
            return (2 * p) % 1
        return (2.0 * float(p)) % 1.0

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class TentMap(_IntervalSystem):
    """x -> 2x for x <= 1/2, else 2 - 2x.  Fraction bases stay exact."""

    kind = "tent_map"

    def step(self, p):
        if isinstance(p, Fraction):
            return 2 * p if p <= Fraction(1, 2) else 2 - 2 * p
        p = float(p)
        return 2.0 * p if p <= 0.5 else 2.0 - 2.0 * p

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class LogisticMap(_IntervalSystem):
    """x -> r x (1 - x) in double precision."""

    r: float = 4.0
    kind = "logistic_map"

    def __post_init__(self) -> None:
        if not (isinstance(self.r, (int, float)) and 0 <= self.r <= 4):
            raise ValueError("logistic parameter must lie in [0, 4]")

    def step(self, p):
        p = float(p)
        return self.r * p * (1.0 - p)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "r": self.r}


def _first_mismatch_matrix(wa: np.ndarray, wb: np.ndarray, horizon: int) -> np.ndarray:
    """Distance matrix 2**-(first differing index) between two window stacks.

    ``wa``/``wb`` are uint8 matrices whose rows are symbol windows of length
    >= horizon.  Agreement through the full horizon yields distance 0.
    """
    m, n = wa.shape[0], wb.shape[0]
    first = np.full((m, n), horizon, dtype=np.int32)
    undecided = np.ones((m, n), dtype=bool)
    for k in range(horizon):
        neq = wa[:, k][:, None] != wb[None, :, k]
        hit = undecided & neq
        first[hit] = k
        undecided &= ~neq
        if not undecided.any() and (first < horizon).all():
            break
    with np.errstate(over="ignore"):
        d = np.ldexp(1.0, -first)
    d[first >= horizon] = 0.0
    return d


@dataclass(frozen=True)
class BinaryShift(System):
    """Full one-sided shift on {0,1} with horizon-truncated metric.

    d(x, y) = 2**-k for the first index k < horizon where the sequences
    differ, and 0 when they agree through the horizon.  All distances are
    therefore quantized to powers of two down to ``2**-horizon``.
    """

    horizon: int = DEFAULT_HORIZON
    kind = "binary_shift"
    geometry = GEOMETRY_SHIFT
    diameter = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.horizon, int) and self.horizon >= 1):
            raise ValueError("shift horizon must be a positive integer")

    def dist(self, p, q) -> float:
        sa = self._atom_symbols(p)
        sb = self._atom_symbols(q)
        k = min(len(sa), len(sb), self.horizon)
        neq = np.flatnonzero(sa[:k] != sb[:k])
        if len(neq) == 0:
            return 0.0
        return float(2.0 ** -int(neq[0]))

    def _atom_symbols(self, p) -> np.ndarray:
        """Up to ``horizon`` symbols; finite windows may stop short."""
        if isinstance(p, ShiftPoint):
            return p.symbols(self.horizon)
        if isinstance(p, str):
            return ShiftPoint.from_string(p).symbols(self.horizon)
        arr = np.asarray(p, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("shift point must be a one-dimensional symbol sequence")
        return arr[: self.horizon]

    def step(self, p):
        if isinstance(p, ShiftPoint):
            if p.prefix:
                return ShiftPoint(p.prefix[1:], p.tail)
            if p.tail is None:
                raise InsufficientTailError("cannot shift an empty finite point")
            return ShiftPoint((), p.tail[1:] + p.tail[:1])
        raise ValueError("step requires a ShiftPoint")

    def _segment(self, x, n: int) -> OrbitSegment:
        symbols = _shift_symbols(x, n + self.horizon)
        return OrbitSegment(self, x, n, symbols)

    def _segment_point(self, seg: OrbitSegment, k: int) -> tuple[int, ...]:
        return tuple(int(s) for s in seg.data[k:k + self.horizon])

    def _prefix_data(self, data, m: int):
        return data[: m + self.horizon]

    def window_matrix(self, atoms) -> np.ndarray:
        rows = []
        for a in atoms:
            s = self._atom_symbols(a)
            if len(s) < self.horizon:
                s = np.concatenate([s, np.zeros(self.horizon - len(s), dtype=np.uint8)])
            rows.append(s)
        return np.stack(rows) if rows else np.zeros((0, self.horizon), dtype=np.uint8)

    def pairwise_dist(self, atoms_a, atoms_b) -> np.ndarray:
        wa = self.window_matrix(atoms_a)
        wb = self.window_matrix(atoms_b)
        return _first_mismatch_matrix(wa, wb, self.horizon)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "shift_horizon": self.horizon}


@dataclass(frozen=True)
class ProductSystem(System):
    """Product of two systems with the max metric on state pairs."""

    first: System
    second: System
    kind = "product"
    geometry = GEOMETRY_PRODUCT

    @property
    def diameter(self) -> float:  # type: ignore[override]
        return max(self.first.diameter, self.second.diameter)

    def _split(self, p) -> tuple:
        if not (isinstance(p, tuple) and len(p) == 2):
            raise ValueError("product point must be a pair")
        return p

    def dist(self, p, q) -> float:
        p1, p2 = self._split(p)
        q1, q2 = self._split(q)
        return max(self.first.dist(p1, q1), self.second.dist(p2, q2))

    def step(self, p):
        p1, p2 = self._split(p)
        return (self.first.step(p1), self.second.step(p2))

    def _segment(self, x, n: int) -> OrbitSegment:
        x1, x2 = self._split(x)
        return OrbitSegment(self, x, n, (self.first.orbit_segment(x1, n),
                                         self.second.orbit_segment(x2, n)))

    def _segment_point(self, seg: OrbitSegment, k: int):
        sa, sb = seg.data
        return (sa.point(k), sb.point(k))

    def _prefix_data(self, data, m: int):
        sa, sb = data
        return (sa.prefix(m), sb.prefix(m))

    def pairwise_dist(self, atoms_a, atoms_b) -> np.ndarray:
        fa = [a[0] for a in atoms_a]
        sa = [a[1] for a in atoms_a]
        fb = [b[0] for b in atoms_b]
        sb = [b[1] for b in atoms_b]
        return np.maximum(self.first.pairwise_dist(fa, fb),
                          self.second.pairwise_dist(sa, sb))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "first": self.first.to_dict(),
                "second": self.second.to_dict()}


def product_system(a: System, b: System) -> ProductSystem:
    return ProductSystem(a, b)


# ---------------------------------------------------------------------------
# module-level operations


def dist(system: System, p, q) -> float:
    return system.dist(p, q)


def orbit_segment(system: System, x, n: int) -> OrbitSegment:
    return system.orbit_segment(x, n)


def cost_matrix(seg_x: OrbitSegment, seg_y: OrbitSegment) -> CostMatrix:
    """All pairwise distances between two orbit segments of equal length."""
    if seg_x.system != seg_y.system:
        raise ValueError("orbit segments come from different systems")
    if seg_x.length != seg_y.length:
        raise ValueError("orbit segments must have equal length")
    return _segment_cost(seg_x.system, seg_x, seg_y)


def _segment_cost(system: System, seg_x: OrbitSegment, seg_y: OrbitSegment) -> CostMatrix:
    n = seg_x.length
    if system.geometry == GEOMETRY_SHIFT:
        X, Y = seg_x.data, seg_y.data
        K = system.horizon
        wa = np.lib.stride_tricks.sliding_window_view(X, K)[:n]
        wb = np.lib.stride_tricks.sliding_window_view(Y, K)[:n]
        return CostMatrix(_first_mismatch_matrix(wa, wb, K), 2.0 ** -K)
    if system.geometry == GEOMETRY_PRODUCT:
        ca = _segment_cost(system.first, seg_x.data[0], seg_y.data[0])
        cb = _segment_cost(system.second, seg_x.data[1], seg_y.data[1])
        return CostMatrix(np.maximum(ca.entries, cb.entries),
                          max(ca.precision_bound, cb.precision_bound))
    return CostMatrix(system.pairwise_dist(seg_x.data, seg_y.data), 0.0)


def aligned_distances(system: System, seg_x: OrbitSegment, seg_y: OrbitSegment) -> np.ndarray:
    """The sequence d(T^k x, T^k y) for k < length, as a float array."""
    if seg_x.system != seg_y.system or seg_x.length != seg_y.length:
        raise ValueError("orbit segments must share system and length")
    n = seg_x.length
    if system.geometry == GEOMETRY_SHIFT:
        X, Y = seg_x.data, seg_y.data
        K = system.horizon
        first = np.full(n, K, dtype=np.int32)
        undecided = np.ones(n, dtype=bool)
        for k in range(K):
            neq = X[k:k + n] != Y[k:k + n]
            hit = undecided & neq
            first[hit] = k
            undecided &= ~neq
        d = np.ldexp(1.0, -first)
        d[first >= K] = 0.0
        return d
    if system.geometry == GEOMETRY_PRODUCT:
        da = aligned_distances(system.first, seg_x.data[0], seg_y.data[0])
        db = aligned_distances(system.second, seg_x.data[1], seg_y.data[1])
        return np.maximum(da, db)
    a, b = seg_x.data, seg_y.data
    d = np.abs(a - b)
    if system.geometry == GEOMETRY_CIRCLE:
        return np.minimum(d, 1.0 - d)
    return d


def build_example31_point(variant: str, block_rule, n_blocks: int) -> ShiftPoint:
    """Block point for the slow-alternation construction on the binary shift.

    The point is a concatenation of constant blocks whose lengths follow
    ``block_rule`` (the name "factorial" or an explicit length sequence).
    Variant "U" uses symbol 0 on odd-indexed blocks (1-based) and 1 on even
    ones; variant "V" is the complement.  The tail repeats the last block's
    symbol forever.
    """
    if variant not in ("U", "V"):
        raise ValueError("variant must be 'U' or 'V'")
    if n_blocks < 1:
        raise ValueError("need at least one block")
    lengths = block_lengths(block_rule, n_blocks)
    prefix: list[int] = []
    sym = 0
    for i, a in enumerate(lengths, start=1):
        odd = i % 2 == 1
        sym = (0 if odd else 1) if variant == "U" else (1 if odd else 0)
        prefix.extend([sym] * a)
    return ShiftPoint(tuple(prefix), (sym,))


def block_lengths(block_rule, n_blocks: int) -> list[int]:
    if block_rule == "factorial":
        return [math.factorial(i) for i in range(1, n_blocks + 1)]
    lengths = [int(a) for a in block_rule][:n_blocks]
    if len(lengths) < n_blocks:
        raise ValueError(f"block rule supplies {len(lengths)} lengths, {n_blocks} needed")
    if any(a < 1 for a in lengths):
        raise ValueError("block lengths must be positive")
    return lengths


# ---------------------------------------------------------------------------
# serialization

_KINDS = {
    "circle_rotation": lambda d: CircleRotation(alpha=float(d["alpha"])),
    "doubling_map": lambda d: DoublingMap(),
    "tent_map": lambda d: TentMap(),
    "logistic_map": lambda d: LogisticMap(r=float(d.get("r", 4.0))),
    "binary_shift": lambda d: BinaryShift(horizon=int(d.get("shift_horizon", DEFAULT_HORIZON))),
}


def system_from_dict(d: dict) -> System:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("system spec must be an object with a 'kind' field")
    kind = d["kind"]
    if kind == "product":
        if "first" not in d or "second" not in d:
            raise ValueError("product spec needs 'first' and 'second' sub-specs")
        return ProductSystem(system_from_dict(d["first"]), system_from_dict(d["second"]))
    if kind not in _KINDS:
        raise ValueError(f"unknown system kind {kind!r}")
    return _KINDS[kind](d)


def system_from_json(text: str) -> System:
    return system_from_dict(json.loads(text))
