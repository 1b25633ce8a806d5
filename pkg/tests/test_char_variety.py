import cmath
import math

from hypothesis import given, settings
from hypothesis import strategies as st

from pvrh.char_variety import (
    CharVarPoint,
    char_coords,
    check_coords,
    fricke_ok,
    fricke_residual,
    hat_coords,
    monodromy_action,
)
from pvrh.mono_core import monodromy_shift, stokes_check, stokes_hat

from support import THETA_DESK, doubly_truncated_pair, random_valid_pair


def test_coords_read_the_designated_entries(rng):
    pair = random_valid_pair(rng)
    point = char_coords(pair)
    assert point.x0 == pair.m0.m11
    assert point.x1 == pair.m1.m11
    assert point.x2 == pair.product().trace()
    t0, t1, w = point.ambient
    assert abs(w - cmath.exp(-1j * math.pi * pair.theta.thetaInf)) < 1e-15
    assert abs(t0 - 2.0 * cmath.cos(cmath.pi * pair.theta.theta0)) < 1e-15
    assert abs(t1 - 2.0 * cmath.cos(cmath.pi * pair.theta.theta1)) < 1e-15


def test_membership_is_sharp(rng):
    pair = random_valid_pair(rng)
    point = char_coords(pair)
    assert fricke_ok(point)
    off = CharVarPoint(point.x0 + 0.01, point.x1, point.x2, point.ambient)
    assert not fricke_ok(off)
    assert abs(fricke_residual(off)) > 1e-6


def test_doubly_truncated_point_solves_cubic():
    point = char_coords(doubly_truncated_pair(THETA_DESK))
    assert point.x0 == 0.0 and point.x1 == 0.0
    assert abs(fricke_residual(point)) < 1e-15


def test_action_matches_matrix_conjugation(rng):
    for _ in range(100):
        pair = random_valid_pair(rng)
        point = char_coords(pair)
        moved = monodromy_action(point)
        brute = char_coords(monodromy_shift(pair, 1))
        assert abs(moved.x0 - brute.x0) < 1e-12
        assert abs(moved.x1 - brute.x1) < 1e-12
        assert moved.x2 == point.x2
        assert moved.ambient == point.ambient


def test_action_preserves_membership(rng):
    point = char_coords(random_valid_pair(rng))
    for _ in range(6):
        point = monodromy_action(point)
        assert fricke_ok(point, tol=1e-11)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6))
def test_action_is_invertible_on_the_surface(seed):
    # conjugation by the inverse loop undoes the polynomial map, which on
    # coordinates means the action composed with the shift by -1 is the
    # identity; verified through the matrix route
    import random as _random
    pair = random_valid_pair(_random.Random(seed), s_bound=0.6)
    point = char_coords(pair)
    moved = monodromy_action(point)
    back = char_coords(monodromy_shift(monodromy_shift(pair, 1), -1))
    assert abs(back.x0 - point.x0) < 1e-12
    assert abs(back.x1 - point.x1) < 1e-12
    assert abs(moved.x2 - back.x2) < 1e-12


def test_twist_maps_agree_with_matrix_route(rng):
    for _ in range(50):
        pair = random_valid_pair(rng)
        point = char_coords(pair)

        hp = hat_coords(point)
        hb = char_coords(stokes_hat(pair))
        assert abs(hp.x0 - hb.x0) < 1e-11
        assert abs(hp.x1 - hb.x1) < 1e-11
        assert abs(hp.x2 - hb.x2) < 1e-11

        cp = check_coords(point)
        cb = char_coords(stokes_check(pair))
        assert abs(cp.x0 - cb.x0) < 1e-11
        assert abs(cp.x1 - cb.x1) < 1e-11
        assert abs(cp.x2 - cb.x2) < 1e-11


def test_twist_maps_move_ambient(rng):
    point = char_coords(random_valid_pair(rng))
    t0, t1, w = point.ambient
    assert hat_coords(point).ambient == (t0, t1, 1.0 / w)
    assert check_coords(point).ambient == (t0, t1, 1.0 / w)
    assert abs(fricke_residual(hat_coords(point))) < 1e-12
    assert abs(fricke_residual(check_coords(point))) < 1e-12


def test_twist_maps_are_mutually_inverse(rng):
    # w -> 1/w -> w, so composing the two half-turn maps either way comes
    # back to the starting point
    for _ in range(25):
        point = char_coords(random_valid_pair(rng))
        for q in (check_coords(hat_coords(point)),
                  hat_coords(check_coords(point))):
            assert abs(q.x0 - point.x0) < 1e-12
            assert abs(q.x1 - point.x1) < 1e-12
            assert q.x2 == point.x2
            assert abs(q.ambient[2] - point.ambient[2]) < 1e-15
