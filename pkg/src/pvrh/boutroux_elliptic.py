"""Elliptic layer: modulus curve, cycle integrals, sn, and the pole lattice.

Everything here lives on the genus-one curve w^2 = (1-z^2)(A-z^2) with
branch cuts [-1, -A^(1/2)] and [A^(1/2), 1]. The upper-sheet branch is
the one with z^{-2} w -> -1 at infinity. Cycle a is realized as the
doubled segment between the inner branch points (both sheets), cycle b
as a confocal ellipse around the left cut; with those choices the
periods for real A in (0,1) come out as 4K and 2iK', which is exactly
the sn period lattice used downstream.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateCurve, DegenerateLattice, NearPole, NoConvergence

_GL20 = np.polynomial.legendre.leggauss(20)
_GL40 = np.polynomial.legendre.leggauss(40)

_A_DEGENERATE_TOL = 1e-12


def _sqrt_a(A: complex) -> complex:
    """Principal square root of the modulus parameter (Re >= 0)."""
    s = cmath.sqrt(A)
    if s.real < 0:
        s = -s
    return s


def curve_w_plus(A: complex, z: complex) -> complex:
    """Upper-sheet value of w = sqrt((1-z^2)(A-z^2)).

    Built from two single-valued factors, one per cut, so the result is
    continuous everywhere off the cuts and behaves like -z^2 at infinity.
    """
    sA = _sqrt_a(A)
    m = 0.5 * (1.0 + sA)
    d = 0.5 * (1.0 - sA)
    zr = z - m
    zl = z + m
    omega = zr * cmath.sqrt(1.0 - (d / zr) ** 2) if zr != 0 else -cmath.sqrt(-(d * d))
    omega_t = zl * cmath.sqrt(1.0 - (d / zl) ** 2) if zl != 0 else -cmath.sqrt(-(d * d))
    return -omega * omega_t


@dataclass(frozen=True)
class EllipticCurveSpec:
    A: complex
    branch_convention: str = "w ~ -z^2 on the upper sheet"

    def w(self, z: complex) -> complex:
        return curve_w_plus(self.A, z)


@dataclass(frozen=True)
class BoutrouxSolution:
    phi: float
    A: complex
    omegaA: Optional[complex]
    omegaB: Optional[complex]
    quadrature_error: float
    residuals: Tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class PoleLattice:
    base: complex
    omegaA: complex
    omegaB: complex
    window: Tuple[float, float, float, float]
    points: Tuple[complex, ...] = field(default_factory=tuple)


def _gl_panel(f, a: float, b: float, nodes_weights) -> complex:
    x, w = nodes_weights
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * sum(wi * f(mid + half * xi) for xi, wi in zip(x, w))


def _adaptive_gl(f, a: float, b: float, tol: float) -> Tuple[complex, float]:
    """Adaptive Gauss-Legendre by interval bisection, open nodes."""
    total = 0.0 + 0.0j
    err_total = 0.0
    stack = [(a, b)]
    panels = 0
    while stack:
        lo, hi = stack.pop()
        panels += 1
        if panels > 4096:
            raise NoConvergence("adaptive quadrature exceeded panel budget")
        coarse = _gl_panel(f, lo, hi, _GL20)
        fine = _gl_panel(f, lo, hi, _GL40)
        err = abs(fine - coarse)
        if err < tol * max(1.0, abs(fine)) or (hi - lo) < 1e-13:
            total += fine
            err_total += err
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid))
            stack.append((mid, hi))
    return total, err_total


def _a_cycle(A: complex, integrand_tag: str, tol: float = 1e-12) -> Tuple[complex, float]:
    """Doubled inner segment, parametrized z = sqrt(A) sin(psi).

    On the open segment w_plus equals sqrt(A) cos(psi) sqrt(1 - A sin^2 psi)
    with the principal branch (both sides are continuous, nonvanishing, and
    agree at psi = 0 where w_plus(0) = sqrt(A)). Cancelling the cos(psi)
    zeros against dz analytically keeps the integrand finite at the ends
    even when the second cut sits close by (|A| near 1, where the naive
    quotient loses all digits and can divide by a rounded-to-zero curve
    value).
    """
    if integrand_tag == "period":
        def f(psi):
            return 1.0 / cmath.sqrt(1.0 - A * math.sin(psi) ** 2)
    else:
        def f(psi):
            c = math.cos(psi)
            return A * c * c / cmath.sqrt(1.0 - A * math.sin(psi) ** 2)

    val, err = _adaptive_gl(f, -0.5 * math.pi, 0.5 * math.pi, tol)
    return 2.0 * complex(val), 2.0 * float(err)


def _b_contour_params(A: complex) -> Tuple[complex, complex, float]:
    """Confocal ellipse around the left cut, clear of the right-hand branch points."""
    sA = _sqrt_a(A)
    m = 0.5 * (1.0 + sA)
    d = 0.5 * (1.0 - sA)
    if abs(d) < 1e-15:
        raise DegenerateCurve("left cut collapsed (A at 1)")
    delta = 0.15 * min(abs(1.0 - sA), abs(sA))
    hardcap = (abs(m + sA) - delta) / abs(d)
    aim = 1.0 + delta / abs(d)
    cosh_rho = min(max(aim, 1.02), 0.98 * hardcap)
    if cosh_rho <= 1.0 + 1e-9:
        raise DegenerateCurve("no room for the b contour (A too close to 0)")
    rho = math.acosh(cosh_rho)
    return m, d, rho


def _b_cycle(A: complex, integrand_tag: str, tol: float = 1e-12) -> Tuple[complex, float]:
    """Counterclockwise confocal ellipse z(t) = -m + d cos(t - i rho)."""
    m, d, rho = _b_contour_params(A)

    def point(t):
        w_arg = complex(t, -rho)
        z = -m + d * cmath.cos(w_arg)
        dz = -d * cmath.sin(w_arg)
        return z, dz

    def g(t):
        z, dz = point(t)
        if integrand_tag == "period":
            return dz / curve_w_plus(A, z)
        return (A - z * z) * dz / curve_w_plus(A, z)

    n = 64
    prev = None
    while n <= (1 << 16):
        h = 2.0 * math.pi / n
        total = complex(h * sum(g(i * h) for i in range(n)))
        if prev is not None:
            err = abs(total - prev)
            if err < tol * max(1.0, abs(total)):
                return total, err
        prev = total
        n *= 2
    raise NoConvergence("trapezoid doubling on the b cycle did not settle")


def cycle_integral(A: complex, integrand_tag: str, cycle: str) -> complex:
    """Contour integral over cycle a or b.

    integrand_tag "period" integrates dz/w; "boutroux" integrates
    sqrt((A-z^2)/(1-z^2)) dz, realized as (A-z^2)/w dz on the upper sheet.
    """
    if integrand_tag not in ("boutroux", "period"):
        raise ValueError(f"unknown integrand_tag {integrand_tag!r}")
    if cycle not in ("a", "b"):
        raise ValueError(f"unknown cycle {cycle!r}")
    if integrand_tag == "period" and (
        abs(A) < _A_DEGENERATE_TOL or abs(A - 1.0) < _A_DEGENERATE_TOL
    ):
        raise DegenerateCurve("period integral at a trigonometric limit point")
    if cycle == "a":
        val, _ = _a_cycle(A, integrand_tag)
    else:
        val, _ = _b_cycle(A, integrand_tag)
    return val


def _boutroux_residuals(A: complex, phi: float) -> Tuple[float, float, float]:
    rot = cmath.exp(1j * phi)
    ia, ea = _a_cycle(A, "boutroux")
    ib, eb = _b_cycle(A, "boutroux")
    return float((rot * ia).real), float((rot * ib).real), ea + eb


def _residuals_checked(A: complex, phi: float) -> Tuple[float, float, float]:
    """Residuals with numeric blowups mapped to DegenerateCurve.

    Near A = 0 the two branch cuts almost touch and an underflowed curve
    value can divide the integrand by exact zero; a probe landing there is
    a degenerate point, not a fatal error.
    """
    try:
        return _boutroux_residuals(A, phi)
    except (ZeroDivisionError, OverflowError) as exc:
        raise DegenerateCurve(f"curve numerically degenerate at A={A}") from exc


def _newton_boutroux(phi: float, seed: complex) -> complex:
    A = seed
    try:
        fa, fb, _ = _residuals_checked(A, phi)
    except DegenerateCurve as exc:
        raise NoConvergence(f"modulus seed {seed} is degenerate") from exc
    fnorm = math.hypot(fa, fb)
    for _ in range(30):
        if fnorm < 1e-11:
            return A
        h = 1e-7 * (1.0 + abs(A))
        try:
            fa_r, fb_r, _ = _residuals_checked(A + h, phi)
        except DegenerateCurve:
            fa_r, fb_r, _ = _residuals_checked(A - h, phi)
            fa_r, fb_r = 2.0 * fa - fa_r, 2.0 * fb - fb_r
        try:
            fa_i, fb_i, _ = _residuals_checked(A + 1j * h, phi)
        except DegenerateCurve:
            fa_i, fb_i, _ = _residuals_checked(A - 1j * h, phi)
            fa_i, fb_i = 2.0 * fa - fa_i, 2.0 * fb - fb_i
        j11 = (fa_r - fa) / h
        j21 = (fb_r - fb) / h
        j12 = (fa_i - fa) / h
        j22 = (fb_i - fb) / h
        det = j11 * j22 - j12 * j21
        if abs(det) < 1e-30:
            raise NoConvergence("singular Jacobian in the modulus solve")
        dre = -(j22 * fa - j12 * fb) / det
        dim = -(-j21 * fa + j11 * fb) / det
        step = complex(dre, dim)
        for _ in range(7):
            cand = A + step
            try:
                ga, gb, _ = _residuals_checked(cand, phi)
            except DegenerateCurve:
                step *= 0.5
                continue
            gnorm = math.hypot(ga, gb)
            if gnorm < fnorm or gnorm < 1e-11:
                A, fa, fb, fnorm = cand, ga, gb, gnorm
                break
            step *= 0.5
        else:
            raise NoConvergence("damped step failed to reduce the residual")
    if fnorm < 1e-11:
        return A
    raise NoConvergence(f"modulus solve stalled at residual {fnorm:.3e}")


_MARCH_STEP = 0.05
_march_cache = {}
_solution_cache = {}
_cache_lock = threading.Lock()


def _march_to(target: float) -> complex:
    """Continuation in phi from the A=1 anchor at phi = pi/2 down to target.

    Newton steps reuse the previous grid solution as seed; grid values are
    memoized so nearby requests march only the missing tail.
    """
    half_pi = 0.5 * math.pi
    ngrid = int(math.ceil((half_pi - target) / _MARCH_STEP))
    # the anchor itself sits on a degenerate curve; start just inside
    A = complex(0.98, 0.01)
    start = 1
    with _cache_lock:
        for k in range(ngrid - 1, 0, -1):
            if k in _march_cache:
                A = _march_cache[k]
                start = k + 1
                break
    for k in range(start, ngrid):
        phi_k = half_pi - k * _MARCH_STEP
        if phi_k <= target:
            break
        A = _newton_boutroux(phi_k, A)
        with _cache_lock:
            _march_cache[k] = A
    return _newton_boutroux(target, A)


def solve_boutroux(phi: float) -> BoutrouxSolution:
    """Modulus A_phi with both cycle conditions zeroed, plus its periods.

    The solution is periodic in phi with period pi and conjugates under
    phi -> -phi, so everything reduces to the fundamental strip [0, pi/2].
    At the two strip ends the curve degenerates and the divergent period
    is reported as None.
    """
    key = round(phi, 12)
    with _cache_lock:
        if key in _solution_cache:
            return _solution_cache[key]

    half_pi = 0.5 * math.pi
    phi_mod = phi - math.pi * math.floor(phi / math.pi)
    if phi_mod > half_pi:
        conj_of = solve_boutroux(math.pi - phi_mod)
        sol = BoutrouxSolution(
            phi=phi,
            A=conj_of.A.conjugate(),
            omegaA=None if conj_of.omegaA is None else conj_of.omegaA.conjugate(),
            omegaB=None if conj_of.omegaB is None else conj_of.omegaB.conjugate(),
            quadrature_error=conj_of.quadrature_error,
            residuals=conj_of.residuals,
        )
        with _cache_lock:
            _solution_cache[key] = sol
        return sol

    if phi_mod < 1e-12:
        sol = BoutrouxSolution(phi=phi, A=0.0 + 0.0j, omegaA=2.0 * math.pi + 0.0j,
                               omegaB=None, quadrature_error=0.0)
    elif abs(phi_mod - half_pi) < 1e-12:
        sol = BoutrouxSolution(phi=phi, A=1.0 + 0.0j, omegaA=None,
                               omegaB=1j * math.pi, quadrature_error=0.0)
    else:
        A = _march_to(phi_mod)
        if not (-1e-8 <= A.real <= 1.0 + 1e-8):
            raise NoConvergence(f"modulus left the physical strip: {A}")
        ra, rb, qerr = _boutroux_residuals(A, phi_mod)
        oa, ea = _a_cycle(A, "period")
        ob, eb = _b_cycle(A, "period")
        sol = BoutrouxSolution(phi=phi, A=A, omegaA=oa, omegaB=ob,
                               quadrature_error=max(qerr, ea, eb),
                               residuals=(ra, rb))
    with _cache_lock:
        _solution_cache[key] = sol
    return sol


def _agm(a: complex, b: complex) -> complex:
    """Arithmetic-geometric mean with the standard branch choice."""
    for _ in range(64):
        if abs(a - b) < 1e-16 * max(1.0, abs(a)):
            return 0.5 * (a + b)
        a1 = 0.5 * (a + b)
        b1 = cmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
    return 0.5 * (a + b)


def _quarter_periods(k: complex) -> Tuple[complex, complex]:
    """(K, K') from the arithmetic-geometric mean; k is the modulus."""
    ksq = k * k
    kp = cmath.sqrt(1.0 - ksq)
    K = 0.5 * math.pi / _agm(1.0, kp)
    Kp = 0.5 * math.pi / _agm(1.0, k)
    return K, Kp


def _theta_quads(v: complex, q: complex):
    """theta_1..theta_4 at argument v and nome q, series cut at 1e-16 terms."""
    t1 = 0.0 + 0.0j
    t2 = 0.0 + 0.0j
    for n in range(0, 64):
        qn = q ** ((n + 0.5) ** 2)
        a1 = qn * cmath.sin((2 * n + 1) * v)
        a2 = qn * cmath.cos((2 * n + 1) * v)
        t1 += (-1) ** n * a1
        t2 += a2
        if n > 2 and abs(a1) < 1e-16 and abs(a2) < 1e-16:
            break
    t3 = 1.0 + 0.0j
    t4 = 1.0 + 0.0j
    for n in range(1, 64):
        qn = q ** (n * n)
        c = qn * cmath.cos(2 * n * v)
        t3 += 2.0 * c
        t4 += 2.0 * (-1) ** n * c
        if abs(c) < 1e-16:
            break
    return 2.0 * t1, 2.0 * t2, t3, t4


def _reduce_lattice(u: complex, p1: complex, p2: complex) -> complex:
    """Shift u by integer multiples of p1, p2 into the fundamental cell."""
    det = p1.real * p2.imag - p1.imag * p2.real
    if abs(det) < 1e-14 * max(1.0, abs(p1) * abs(p2)):
        return u
    alpha = (u.real * p2.imag - u.imag * p2.real) / det
    beta = (p1.real * u.imag - p1.imag * u.real) / det
    return u - round(alpha) * p1 - round(beta) * p2


def _sn_cn_dn(u: complex, k: complex):
    ksq = k * k
    if abs(ksq) < 1e-8:
        return cmath.sin(u), cmath.cos(u), 1.0 + 0.0j
    if abs(1.0 - ksq) < 1e-8:
        s = cmath.tanh(u)
        c = 1.0 / cmath.cosh(u)
        return s, c, c
    K, Kp = _quarter_periods(k)
    q = cmath.exp(-math.pi * Kp / K)
    if abs(q) >= 0.999:
        raise NoConvergence("nome too close to the unit circle")
    u_red = _reduce_lattice(u, 4.0 * K, 2j * Kp)
    v = 0.5 * math.pi * u_red / K
    t1, t2, t3, t4 = _theta_quads(v, q)
    z1, z2, z3, z4 = _theta_quads(0.0, q)
    if abs(t4) < 1e-12 * max(abs(t1), 1.0):
        raise NearPole("argument sits on the sn pole lattice")
    sn = (z3 / z2) * (t1 / t4)
    cn = (z4 / z2) * (t2 / t4)
    dn = (z4 / z3) * (t3 / t4)
    if abs(sn) > 1e8:
        raise NearPole("sn overflow guard tripped")
    return sn, cn, dn


def jacobi_sn(u: complex, k: complex) -> complex:
    """Jacobi sn for complex argument and complex modulus k."""
    return _sn_cn_dn(u, k)[0]


def sn_derivative(u: complex, k: complex) -> complex:
    """d(sn)/du = cn * dn (insensitive to the half-lattice reduction signs)."""
    _, cn, dn = _sn_cn_dn(u, k)
    return cn * dn


def pole_lattice(base: complex, sol: BoutrouxSolution,
                 window: Tuple[float, float, float, float]) -> PoleLattice:
    """Points {base + omegaA*Z + omegaB*(2Z+1)} inside a closed rectangle.

    window = (re_min, re_max, im_min, im_max).
    """
    oa, ob = sol.omegaA, sol.omegaB
    if oa is None or ob is None:
        raise DegenerateLattice("a period is infinite at this phi")
    det = (oa.conjugate() * ob).imag
    if abs(det) < 1e-12 * abs(oa) * abs(ob):
        raise DegenerateLattice("periods are numerically parallel")
    re_min, re_max, im_min, im_max = window
    corners = [complex(re_min, im_min), complex(re_min, im_max),
               complex(re_max, im_min), complex(re_max, im_max)]
    d = oa.real * ob.imag - oa.imag * ob.real
    nrange = []
    mrange = []
    for c in corners:
        u = c - base
        n = (u.real * ob.imag - u.imag * ob.real) / d
        m = (oa.real * u.imag - oa.imag * u.real) / d
        nrange.append(n)
        mrange.append(m)
    pts = []
    for n in range(int(math.floor(min(nrange))) - 1, int(math.ceil(max(nrange))) + 2):
        for m in range(int(math.floor(min(mrange))) - 1, int(math.ceil(max(mrange))) + 2):
            if m % 2 == 0:
                continue
            p = base + n * oa + m * ob
            if re_min - 1e-12 <= p.real <= re_max + 1e-12 and \
               im_min - 1e-12 <= p.imag <= im_max + 1e-12:
                pts.append(p)
    pts.sort(key=lambda p: (p.real, p.imag))
    return PoleLattice(base=base, omegaA=oa, omegaB=ob, window=window,
                       points=tuple(pts))
