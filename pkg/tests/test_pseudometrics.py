import itertools
from fractions import Fraction

import numpy as np
import pytest

from orbitmetric import (
    BinaryShift,
    CircleRotation,
    DoublingMap,
    ProductSystem,
    Schedule,
    ShiftPoint,
    SizeLimitError,
    besicovitch_estimate,
    besicovitch_n,
    delta_n,
    ebar_estimate,
    ebar_n,
    etilde_estimate,
    sample_point,
    sandwich_check,
    weyl_profile,
)
from orbitmetric.systems import TentMap, cost_matrix

GOLDEN = 0.6180339887498949


# ------------------------------------------------------------------ ebar

def test_ebar_distinct_fixed_points_stay_apart():
    sh = BinaryShift()
    for n in (1, 7, 64):
        assert ebar_n(sh, ShiftPoint.zeros(), ShiftPoint.ones(), n) == 1.0


def test_ebar_vanishes_on_equal_points():
    rot = CircleRotation(GOLDEN)
    for n in (1, 10, 100):
        assert ebar_n(rot, 0.3, 0.3, n) == pytest.approx(0.0, abs=1e-12)


def test_ebar_rotation_bounded_by_initial_gap():
    # rotations are isometries, so matching i -> i already achieves d(x, y)
    rot = CircleRotation(GOLDEN)
    for n in (5, 50, 500):
        assert ebar_n(rot, 0.0, 0.1, n) <= 0.1 + 1e-12


def test_ebar_methods_agree():
    rng = np.random.default_rng(31)
    dbl = DoublingMap()
    for _ in range(10):
        x, y = sample_point(dbl, rng), sample_point(dbl, rng)
        n = int(rng.integers(2, 40))
        fast = ebar_n(dbl, x, y, n)
        slow = ebar_n(dbl, x, y, n, method="assignment")
        assert fast == pytest.approx(slow, abs=1e-9)


def test_ebar_shift_tree_matches_assignment():
    # window distances are dyadic, so both routes are float-exact and must
    # agree to the bit, not just to tolerance
    rng = np.random.default_rng(92)
    sh = BinaryShift()
    for _ in range(25):
        x, y = sample_point(sh, rng), sample_point(sh, rng)
        n = int(rng.integers(1, 90))
        assert ebar_n(sh, x, y, n) == ebar_n(sh, x, y, n, method="assignment")
    x = ShiftPoint.from_string("", "011")
    y = ShiftPoint.from_string("", "110")
    # same orbit one step apart: the matching bound m*diam/n is attained
    assert ebar_n(sh, x, y, 200) == 1.0 / 200
    assert ebar_n(sh, x, y, 200, method="assignment") == 1.0 / 200


def test_ebar_estimate_tracks_checkpoints():
    sh = BinaryShift()
    est = ebar_estimate(sh, ShiftPoint.zeros(), ShiftPoint.ones(), Schedule((5, 10, 20), 1))
    assert est.values == (1.0, 1.0, 1.0)
    assert est.tail_sup == 1.0
    assert est.tail_last == 1.0
    rng = np.random.default_rng(93)
    sched = Schedule((3, 17, 64), 1)
    for _ in range(5):
        x, y = sample_point(sh, rng), sample_point(sh, rng)
        est = ebar_estimate(sh, x, y, sched)
        assert list(est.values) == [ebar_n(sh, x, y, n) for n in sched.checkpoints]


def test_ebar_shifted_start_fades_linearly():
    # y on the same orbit m steps ahead costs at most m*diam/n
    rot = CircleRotation(GOLDEN)
    m = 3
    y = (m * GOLDEN) % 1.0
    for n in (10, 100, 1000):
        assert ebar_n(rot, 0.0, y, n) <= m * rot.diameter / n + 1e-12


def test_ebar_assignment_size_guard():
    sh = BinaryShift()
    with pytest.raises(SizeLimitError):
        ebar_n(sh, ShiftPoint.zeros(), ShiftPoint.ones(), 2001, method="assignment")


def test_ebar_symmetry_exact():
    rng = np.random.default_rng(32)
    pool = [CircleRotation(GOLDEN), BinaryShift(),
            ProductSystem(CircleRotation(0.3), TentMap())]
    for system in pool:
        for _ in range(5):
            x, y = sample_point(system, rng), sample_point(system, rng)
            n = int(rng.integers(1, 30))
            assert ebar_n(system, x, y, n) == ebar_n(system, y, x, n)


def test_ebar_triangle_inequality():
    rng = np.random.default_rng(33)
    dbl = DoublingMap()
    for _ in range(30):
        x, y, z = (sample_point(dbl, rng) for _ in range(3))
        n = int(rng.integers(2, 25))
        dxy = ebar_n(dbl, x, y, n)
        dyz = ebar_n(dbl, y, z, n)
        dxz = ebar_n(dbl, x, z, n)
        assert dxz <= dxy + dyz + 1e-9


# ---------------------------------------------------------- besicovitch

def test_besicovitch_rotation_preserves_gap():
    rot = CircleRotation(GOLDEN)
    assert besicovitch_n(rot, 0.0, 0.1, 1000) == pytest.approx(0.1, abs=1e-12)


def test_besicovitch_eventually_opposite_tail():
    # ten leading zero agreements then symbols disagree forever
    sh = BinaryShift()
    y = ShiftPoint.from_string("0000000000", "1")
    got = besicovitch_n(sh, ShiftPoint.zeros(), y, 500)
    assert got == 0.981998046875


def test_besicovitch_estimate_dominates_ebar():
    rng = np.random.default_rng(34)
    sched = Schedule.geometric(200)
    for system in (CircleRotation(0.3), DoublingMap(), BinaryShift()):
        for _ in range(5):
            x, y = sample_point(system, rng), sample_point(system, rng)
            e = ebar_estimate(system, x, y, sched)
            b = besicovitch_estimate(system, x, y, sched)
            assert all(ev <= bv + 1e-9 for ev, bv in zip(e.values, b.values))


# ----------------------------------------------------------------- weyl

def test_weyl_prefix_window_reproduces_besicovitch():
    sh = BinaryShift()
    y = ShiftPoint.from_string("0000000000", "1")
    prof = weyl_profile(sh, ShiftPoint.zeros(), y, 500, (500,))
    assert prof.sup_window_avg[500] == pytest.approx(
        besicovitch_n(sh, ShiftPoint.zeros(), y, 500), abs=1e-12)


def test_weyl_interior_window_sees_the_bad_stretch():
    # a window inside the all-disagree tail averages exactly 1
    sh = BinaryShift()
    y = ShiftPoint.from_string("0000000000", "1")
    prof = weyl_profile(sh, ShiftPoint.zeros(), y, 500, (100,))
    assert prof.sup_window_avg[100] == pytest.approx(1.0, abs=1e-12)


def test_weyl_dominates_besicovitch_at_each_length():
    rng = np.random.default_rng(35)
    dbl = DoublingMap()
    for _ in range(10):
        x, y = sample_point(dbl, rng), sample_point(dbl, rng)
        prof = weyl_profile(dbl, x, y, 300, (50, 150, 300))
        for l in (50, 150, 300):
            assert prof.sup_window_avg[l] >= besicovitch_n(dbl, x, y, l) - 1e-12


def test_weyl_window_validation():
    rot = CircleRotation(0.3)
    with pytest.raises(ValueError):
        weyl_profile(rot, 0.0, 0.5, 100, (200,))
    with pytest.raises(ValueError):
        weyl_profile(rot, 0.0, 0.5, 100, ())
    with pytest.raises(ValueError):
        weyl_profile(rot, 0.0, 0.5, 100, (0,))


# -------------------------------------------------------------- delta_n

def test_delta_equal_points_is_zero():
    rot = CircleRotation(GOLDEN)
    assert delta_n(rot, 0.25, 0.25, 50, 0.1) == 0


def test_delta_fixed_points_fully_exceed():
    sh = BinaryShift()
    for n in (1, 5, 12):
        assert delta_n(sh, ShiftPoint.zeros(), ShiftPoint.ones(), n, 0.5) == n


def _delta_brute(C: np.ndarray, delta: float) -> int:
    n = C.shape[0]
    best = n
    for perm in itertools.permutations(range(n)):
        best = min(best, sum(1 for i in range(n) if C[i, perm[i]] > delta))
    return best


def test_delta_matches_min_exceedance_over_permutations():
    rng = np.random.default_rng(36)
    dbl = DoublingMap()
    for _ in range(15):
        x, y = sample_point(dbl, rng), sample_point(dbl, rng)
        delta = float(rng.uniform(0.05, 0.6))
        C = cost_matrix(dbl.orbit_segment(x, 6), dbl.orbit_segment(y, 6))
        assert delta_n(dbl, x, y, 6, delta) == _delta_brute(C.entries, delta)


def test_delta_nonincreasing_in_delta():
    rng = np.random.default_rng(37)
    dbl = DoublingMap()
    x, y = sample_point(dbl, rng), sample_point(dbl, rng)
    vals = [delta_n(dbl, x, y, 30, d) for d in np.linspace(0.01, 0.9, 8)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_delta_rejects_negative_threshold():
    with pytest.raises(ValueError):
        delta_n(CircleRotation(0.3), 0.0, 0.5, 10, -0.2)


def test_delta_dense_size_guard():
    sh = BinaryShift()
    with pytest.raises(SizeLimitError):
        delta_n(sh, ShiftPoint.zeros(), ShiftPoint.ones(), 4097, 0.5)


# --------------------------------------------------------------- etilde

def test_etilde_equal_points_take_first_grid_value():
    rot = CircleRotation(GOLDEN)
    est = etilde_estimate(rot, 0.4, 0.4, Schedule((10, 20), 0), [0.01, 0.02, 0.05])
    assert est.qualified
    assert est.value == 0.01


def test_etilde_fixed_points_exhaust_short_grid():
    # every epsilon < 1 sees full exceedance, so the top of the grid fails
    sh = BinaryShift()
    grid = [0.1 * k for k in range(1, 10)]
    est = etilde_estimate(sh, ShiftPoint.zeros(), ShiftPoint.ones(), Schedule((8,), 0), grid)
    assert not est.qualified
    assert est.value == pytest.approx(0.9)


def test_etilde_fixed_points_qualify_at_diameter():
    sh = BinaryShift()
    grid = [0.25, 0.5, 0.75, 1.0]
    est = etilde_estimate(sh, ShiftPoint.zeros(), ShiftPoint.ones(), Schedule((8,), 0), grid)
    assert est.qualified
    assert est.value == 1.0


def test_etilde_rotation_close_pair_lands_near_gap():
    rot = CircleRotation(GOLDEN)
    grid = [round(0.01 * k, 2) for k in range(1, 11)]
    est = etilde_estimate(rot, 0.0, 0.05, Schedule.geometric(200), grid)
    assert est.qualified
    assert est.value <= 0.06 + 1e-12
    assert est.precision == pytest.approx(0.01)


def test_etilde_grid_validation():
    rot = CircleRotation(0.3)
    sched = Schedule((10,), 0)
    with pytest.raises(ValueError):
        etilde_estimate(rot, 0.0, 0.1, sched, [])
    with pytest.raises(ValueError):
        etilde_estimate(rot, 0.0, 0.1, sched, [0.2, 0.1])
    with pytest.raises(ValueError):
        etilde_estimate(rot, 0.0, 0.1, sched, [0.0, 0.1])
    with pytest.raises(ValueError):
        etilde_estimate(rot, 0.0, 0.1, sched, [0.1, 0.9])  # above circle diameter


# ------------------------------------------------------------- sandwich

def test_sandwich_equal_points_degenerate():
    rot = CircleRotation(GOLDEN)
    rep = sandwich_check(rot, 0.2, 0.2, 10, 0.1)
    assert rep.holds
    assert rep.lhs == 0.0
    assert rep.mid == pytest.approx(0.0, abs=1e-12)


def test_sandwich_fixed_points_tight():
    sh = BinaryShift()
    rep = sandwich_check(sh, ShiftPoint.zeros(), ShiftPoint.ones(), 10, 0.5)
    assert rep.holds
    assert rep.lhs == pytest.approx(5.0)
    assert rep.mid == pytest.approx(10.0)
    assert rep.rhs == pytest.approx(10.0)


def test_sandwich_holds_everywhere():
    rng = np.random.default_rng(38)
    pool = [CircleRotation(GOLDEN), DoublingMap(), BinaryShift()]
    for system in pool:
        for _ in range(20):
            x, y = sample_point(system, rng), sample_point(system, rng)
            n = int(rng.integers(2, 60))
            delta = float(rng.uniform(0.05, 0.8))
            rep = sandwich_check(system, x, y, n, delta)
            assert rep.holds
            assert rep.lhs <= rep.mid + 1e-9
            assert rep.mid <= rep.rhs + 1e-9
