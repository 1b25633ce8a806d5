import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pvrh._highprec import ray_final_mp
from pvrh.asymptotics import formal_series_pv
from pvrh.errors import GridTooCoarse, HitSingularity
from pvrh.mono_core import (
    ThetaTriple,
    gauge_normalize,
    product_from_stokes,
    stokes_from_pair,
    validate_pair,
)
from pvrh.oracle import (
    LinearSystemState,
    LoopSpec,
    canonical_frame,
    default_loops,
    direct_monodromy,
    integrate_pv,
    isomonodromy_drift,
    pv_residual,
    yprime_from_y_zfrak,
    zfrak_from_y_yprime,
)

from support import THETA_DESK, pair_diff

# theta0 + theta1 = 1 with thetaInf = 0 makes y = -1 an exact constant
# solution of the ray system, which gives every oracle check a trajectory
# whose ground truth is known in closed form
TH_CONST = ThetaTriple(0.3, 0.7, 0.0)


def const_state(t: float) -> LinearSystemState:
    z = zfrak_from_y_yprime(TH_CONST, t, -1.0, 0.0)
    return LinearSystemState(t, 0.0, -1.0, z, 0.0, TH_CONST)


def const_seed(t: float) -> dict:
    st_ = const_state(t)
    return {"x": t, "y": -1.0, "zfrak": st_.zfrak}


def desk_series_seed(x: float) -> dict:
    ser = formal_series_pv("minus_one", THETA_DESK, 8)
    y = ser.eval(x)
    return {"x": x, "y": y,
            "zfrak": zfrak_from_y_yprime(THETA_DESK, x, y, ser.eval_deriv(x))}


def test_constant_trajectory_stays_put():
    traj = integrate_pv(TH_CONST, const_seed(40.0), 20.0, n_samples=41)
    assert max(abs(s[1] + 1.0) for s in traj.samples) < 1e-10


def test_zero_length_span_short_circuits():
    seed = const_seed(40.0)
    traj = integrate_pv(TH_CONST, seed, 40.0)
    assert len(traj.samples) == 1
    x, y, z, lu = traj.samples[0]
    assert x == seed["x"] and y == seed["y"] and z == seed["zfrak"]
    assert lu == 0.0


def test_ray_matches_formal_series_downrange():
    # drive the seed far enough in that the order-8 truncation error is
    # visible; the gap must stay inside a conservative multiple of the
    # first dropped term
    seed = desk_series_seed(60.0)
    traj = integrate_pv(THETA_DESK, seed, 30.0, n_samples=7)
    ser8 = formal_series_pv("minus_one", THETA_DESK, 8)
    ser9 = formal_series_pv("minus_one", THETA_DESK, 9)
    c9 = ser9.coeffs[9 - ser9.min_exp]
    budget = 5.0 * abs(c9) * 30.0 ** -9.0
    assert abs(traj.samples[-1][1] - ser8.eval(30.0)) < budget


def test_ray_integration_reverses_cleanly():
    seed = desk_series_seed(60.0)
    down = integrate_pv(THETA_DESK, seed, 30.0, n_samples=7)
    x, y, z, _ = down.samples[-1]
    back = integrate_pv(THETA_DESK, {"x": x, "y": y, "zfrak": z}, 60.0,
                        n_samples=7)
    assert abs(back.samples[-1][1] - seed["y"]) < 1e-9
    assert abs(back.samples[-1][2] - seed["zfrak"]) < 1e-9


def test_seed_input_guards():
    with pytest.raises(ValueError):
        integrate_pv(TH_CONST, {"x": 0.0, "y": -1.0, "zfrak": 0.0}, 10.0)
    with pytest.raises(ValueError):
        integrate_pv(TH_CONST, {"x": 40.0, "y": -1.0}, 30.0)
    with pytest.raises(HitSingularity):
        integrate_pv(TH_CONST, {"x": 40.0, "y": 1e-8, "zfrak": 0.0}, 30.0)
    with pytest.raises(HitSingularity):
        integrate_pv(TH_CONST, {"x": 40.0, "y": 1.0 + 1e-8, "zfrak": 0.0},
                     30.0)


def test_pv_residual_accepts_solution_rejects_impostor():
    xs = [30.0 + 0.1 * k for k in range(41)]
    assert pv_residual(xs, [-1.0] * 41, TH_CONST) < 1e-10
    ys_bad = [-1.0 + 0.05 * math.sin(x) for x in xs]
    assert pv_residual(xs, ys_bad, TH_CONST) > 1e-3


def test_pv_residual_grid_guards():
    with pytest.raises(GridTooCoarse):
        pv_residual([1.0, 2.0, 3.0, 4.0], [-1.0] * 4, TH_CONST)
    xs = [1.0, 2.0, 3.0, 4.1, 5.0]
    with pytest.raises(GridTooCoarse):
        pv_residual(xs, [-1.0] * 5, TH_CONST)


@settings(max_examples=60, deadline=None)
@given(
    yr=st.floats(-2.0, 2.0), yi=st.floats(-1.0, 1.0),
    pr=st.floats(-2.0, 2.0), pi=st.floats(-1.0, 1.0),
    xr=st.floats(2.0, 40.0), xi=st.floats(-10.0, 10.0),
)
def test_zfrak_yprime_conversions_invert(yr, yi, pr, pi, xr, xi):
    y = complex(yr, yi)
    # 0 and 1 are the movable-singularity values of the equation itself
    if abs(y - 1.0) < 0.2 or abs(y) < 0.2:
        return
    x = complex(xr, xi)
    yp = complex(pr, pi)
    z = zfrak_from_y_yprime(THETA_DESK, x, y, yp)
    back = yprime_from_y_zfrak(THETA_DESK, x, y, z)
    assert abs(back - yp) <= 1e-9 * max(1.0, abs(yp), abs(z))


def test_canonical_frame_defect_ladder():
    st_ = const_state(8.0)
    defects = [canonical_frame(st_, 10.0j, N).defect for N in range(5)]
    for lo, hi in zip(defects[1:], defects[:-1]):
        assert lo < hi
    assert defects[-1] < 1e-4
    # order zero keeps the bare exponential: diagonal, no power corrections
    cf0 = canonical_frame(st_, 10.0j, 0)
    assert cf0.frame.m12 == 0.0 and cf0.frame.m21 == 0.0
    assert abs(cf0.frame.m11 - cmath.exp(8.0 * 10.0j / 4.0)) < 1e-12
    res = st_.residue_residuals()
    assert all(v < 1e-12 for v in res.values())


def test_direct_monodromy_lands_on_the_manifold():
    out = direct_monodromy(const_state(8.0))
    rep = validate_pair(out.m0, out.m1, out.theta, tol=1e-6)
    assert rep.ok, rep.residuals
    # the Stokes factorisation read back off the pair reproduces the
    # counterclockwise product
    stk = stokes_from_pair(out)
    recon = product_from_stokes(stk)
    prod = out.product()
    gap = max(abs(a - b) for a, b in
              zip(recon.rows()[0] + recon.rows()[1],
                  prod.rows()[0] + prod.rows()[1]))
    assert gap < 1e-6


def _rect_loops(phi: float, base_point: complex, hw: float, hh: float):
    e = cmath.exp(1j * phi)
    out = []
    for tag, s in (("l0", -e), ("l1", e)):
        top = s + hh * 1j
        ring = (top, s + complex(-hw, hh), s + complex(-hw, -hh),
                s + complex(hw, -hh), s + complex(hw, hh), top)
        out.append(LoopSpec(base_point, tag, ring[1:] + (base_point,)))
    return out[0], out[1]


def test_loop_transport_is_homotopy_invariant_and_matches_frobenius():
    st_ = const_state(8.0)
    base = 140.0j
    square = direct_monodromy(st_, loops=default_loops(0.0, base), N=4,
                              method="transport")
    rect = direct_monodromy(st_, loops=_rect_loops(0.0, base, 0.8, 0.45),
                            N=4, method="transport")
    assert pair_diff(square, rect) < 1e-8
    frob = direct_monodromy(st_, N=4)
    assert pair_diff(square, frob) < 1e-6


def test_drift_small_on_trajectory_large_off_it():
    seed = const_seed(12.0)
    rep = isomonodromy_drift(TH_CONST, seed, [14.0, 12.0])
    assert rep.t_values == (12.0, 14.0)
    assert len(rep.pairs) == 2
    assert rep.drift < 1e-6
    # nudging y off the trajectory at one base point must blow the metric up
    bad = isomonodromy_drift(TH_CONST, seed, [12.0, 14.0],
                             perturb=(14.0, 0.01))
    assert bad.drift > 1e-3


def test_mp_ray_leg_matches_double_integration():
    seed = desk_series_seed(60.0)
    y_mp, z_mp, _ = ray_final_mp(THETA_DESK, seed, 55.0, dps=40)
    traj = integrate_pv(THETA_DESK, seed, 55.0, n_samples=2)
    assert abs(traj.samples[-1][1] - y_mp) < 1e-11
    assert abs(traj.samples[-1][2] - z_mp) < 1e-11


def test_mp_monodromy_matches_double_route():
    st_ = const_state(8.0)
    doubles = gauge_normalize(direct_monodromy(st_)).pair
    high = gauge_normalize(direct_monodromy(st_, dps=40)).pair
    assert pair_diff(doubles, high) < 1e-6
