"""Fricke coordinates on the space of monodromy pairs.

The triple (x0, x1, x2) = (m0_11, m1_11, tr(M1 M0)) satisfies a cubic
relation whose coefficients depend only on the two traces and the
exponential of the infinity parameter. This module carries that cubic,
the half-turn twist maps on coordinates, and the polynomial form of the
full-turn monodromy action.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Tuple

from .mono_core import MonodromyPair


@dataclass(frozen=True)
class CharVarPoint:
    """Point on the cubic surface plus the ambient data that define it.

    ambient = (tr M0, tr M1, e^{-i pi thetaInf}); the cubic's coefficients
    are polynomial in those three scalars, so no theta labels are needed.
    """

    x0: complex
    x1: complex
    x2: complex
    ambient: Tuple[complex, complex, complex]

    def norm_inf(self) -> float:
        return max(abs(self.x0), abs(self.x1), abs(self.x2))


def _coeffs(ambient):
    t0, t1, w = ambient
    mu0 = t0 + w * t1
    mu1 = t1 + w * t0
    kappa = w * w + w * t0 * t1 + 1.0
    return w, mu0, mu1, kappa


def char_coords(pair: MonodromyPair) -> CharVarPoint:
    """Coordinates (m0_11, m1_11, tr(M1 M0)) with ambient filled from theta."""
    th = pair.theta
    ambient = (
        2.0 * cmath.cos(cmath.pi * th.theta0),
        2.0 * cmath.cos(cmath.pi * th.theta1),
        cmath.exp(-1j * cmath.pi * th.thetaInf),
    )
    return CharVarPoint(pair.m0.m11, pair.m1.m11, pair.product().trace(), ambient)


def fricke_residual(point: CharVarPoint) -> complex:
    """Value of the defining cubic at the point (zero on the variety)."""
    w, mu0, mu1, kappa = _coeffs(point.ambient)
    x0, x1, x2 = point.x0, point.x1, point.x2
    return (
        x0 * x1 * x2 + x0 * x0 + x1 * x1
        - mu0 * x0 - mu1 * x1 - w * x2 + kappa
    )


def fricke_ok(point: CharVarPoint, tol: float = 1e-12) -> bool:
    """Scale-aware membership test (cubic growth in the coordinates)."""
    scale = 1.0 + point.norm_inf() ** 3
    return abs(fricke_residual(point)) <= tol * scale


def hat_coords(point: CharVarPoint) -> CharVarPoint:
    """Coordinate image under the upper twist map.

    The ambient moves to the negated infinity parameter (w -> 1/w); the
    output lies on the cubic for that ambient.
    """
    t0, t1, w = point.ambient
    winv = 1.0 / w
    x0h = winv * point.x1
    x1h = t1 - winv * (point.x1 * point.x2 + point.x0 - t0)
    return CharVarPoint(x0h, x1h, point.x2, (t0, t1, winv))


def check_coords(point: CharVarPoint) -> CharVarPoint:
    """Coordinate image under the lower twist map (mirror of hat_coords)."""
    t0, t1, w = point.ambient
    winv = 1.0 / w
    x0c = t0 - winv * (point.x0 * point.x2 + point.x1 - t1)
    x1c = winv * point.x0
    return CharVarPoint(x0c, x1c, point.x2, (t0, t1, winv))


def monodromy_action(point: CharVarPoint) -> CharVarPoint:
    """Polynomial form of conjugation by the composite loop.

    Fixes x2 and preserves the cubic in the same ambient.
    """
    _, mu0, mu1, _ = _coeffs(point.ambient)
    x0, x1, x2 = point.x0, point.x1, point.x2
    y0 = -x1 * x2 - x0 + mu0
    y1 = x1 * x2 * x2 + x0 * x2 - x1 - mu0 * x2 + mu1
    return CharVarPoint(y0, y1, x2, point.ambient)
