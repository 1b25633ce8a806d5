"""Shared builders for the test suite.

Random pairs are produced through the connection-matrix factorization, so
every sample already sits on the monodromy manifold. Tests that need a
broken input tamper with an entry afterwards.
"""

import cmath
import math
import random

from pvrh.asymptotics import formal_series_pv
from pvrh.mono_core import (
    Mat2C,
    MonodromyPair,
    StokesMatrices,
    ThetaTriple,
    product_from_stokes,
)

THETA_DESK = ThetaTriple(1.0 / 3.0, 1.0 / 5.0, 1.0 / 7.0)


def random_theta_component(rng: random.Random, span: float = 0.45) -> float:
    """Real parameter bounded away from 0 so sign resolution stays clean."""
    while True:
        t = rng.uniform(-span, span)
        if abs(t) > 0.02:
            return t


def random_stokes(rng: random.Random, s_bound: float = 0.8,
                  theta_span: float = 0.45) -> StokesMatrices:
    ti = random_theta_component(rng, theta_span)
    s1 = complex(rng.uniform(-s_bound, s_bound), rng.uniform(-s_bound, s_bound))
    s2 = complex(rng.uniform(-s_bound, s_bound), rng.uniform(-s_bound, s_bound))
    return StokesMatrices(s1, s2, ti)


def random_valid_pair(rng: random.Random, s_bound: float = 0.8,
                      theta_span: float = 0.45) -> MonodromyPair:
    """Random manifold point with bounded Stokes entries.

    theta0 and thetaInf are real; theta1 is read back from the trace of
    the product and may come out complex, which every consumer accepts.
    The bounds keep powers of the product well conditioned (cubes stay
    below about 1e4 in entry size), so residual tolerances near 1e-12
    are meaningful.
    """
    stokes = random_stokes(rng, s_bound, theta_span)
    prod = product_from_stokes(stokes)
    t0 = random_theta_component(rng, theta_span)
    tr0 = 2.0 * math.cos(math.pi * t0)
    while True:
        a = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        c = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        if abs(c) < 0.3:
            continue
        b = (a * (tr0 - a) - 1.0) / c
        if abs(b) <= 4.0:
            break
    m0 = Mat2C(a, b, c, tr0 - a)
    m1 = prod @ m0.inv()
    t1 = cmath.acos(0.5 * m1.trace()) / cmath.pi
    return MonodromyPair(m0, m1, ThetaTriple(t0, t1, stokes.thetaInf))


def doubly_truncated_pair(theta: ThetaTriple) -> MonodromyPair:
    """The pair with vanishing corner entries on both matrices."""
    w = cmath.exp(-1j * cmath.pi * theta.thetaInf)
    m0 = Mat2C(0.0, -1.0, 1.0, 2.0 * cmath.cos(cmath.pi * theta.theta0))
    m1 = Mat2C(0.0, w, -1.0 / w, 2.0 * cmath.cos(cmath.pi * theta.theta1))
    return MonodromyPair(m0, m1, theta)


def trunc00_y_yprime(theta: ThetaTriple, c0: complex, x: complex, order: int = 8):
    """Series-plus-correction value and derivative of the Trunc00 family."""
    series = formal_series_pv("small0", theta, order)
    big_l = 0.5 * (theta.theta0 - theta.theta1 - theta.thetaInf)
    mu = 2.0 * theta.theta1 + theta.thetaInf - 1.0
    expo = cmath.exp(-x)
    y = series.eval(x) + big_l * c0 * x ** (mu - 1.0) * expo
    yp = series.eval_deriv(x) + big_l * c0 * (
        (mu - 1.0) * x ** (mu - 2.0) - x ** (mu - 1.0)) * expo
    return y, yp


def r2_0_pair() -> MonodromyPair:
    """Second diagonal entry zero, first one the surviving coordinate."""
    t0, t1, ti = 0.3, 0.2, 0.15
    w = cmath.exp(-1j * math.pi * ti)
    m1_12 = 0.7 + 0.1j
    m1 = Mat2C(0.0, m1_12, -1.0 / m1_12, 2.0 * math.cos(math.pi * t1))
    m0_21 = w / m1_12
    a = 0.5 - 0.2j
    m0_22 = 2.0 * math.cos(math.pi * t0) - a
    m0 = Mat2C(a, (a * m0_22 - 1.0) / m0_21, m0_21, m0_22)
    return MonodromyPair(m0, m1, ThetaTriple(t0, t1, ti))


def r2_1_pair() -> MonodromyPair:
    """Mirror of r2_0_pair with the first diagonal entry zeroed."""
    t0, t1, ti = 0.3, 0.2, 0.15
    w = cmath.exp(-1j * math.pi * ti)
    m0_21 = 1.1 - 0.4j
    m0 = Mat2C(0.0, -1.0 / m0_21, m0_21, 2.0 * math.cos(math.pi * t0))
    m1_12 = w / m0_21
    b = 0.8 + 0.3j
    m1_22 = 2.0 * math.cos(math.pi * t1) - b
    m1 = Mat2C(b, m1_12, (b * m1_22 - 1.0) / m1_12, m1_22)
    return MonodromyPair(m0, m1, ThetaTriple(t0, t1, ti))


def max_entry_diff(a: Mat2C, b: Mat2C) -> float:
    return max(abs(a.m11 - b.m11), abs(a.m12 - b.m12),
               abs(a.m21 - b.m21), abs(a.m22 - b.m22))


def pair_diff(p: MonodromyPair, q: MonodromyPair) -> float:
    return max(max_entry_diff(p.m0, q.m0), max_entry_diff(p.m1, q.m1))
