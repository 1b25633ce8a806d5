"""Minimal Laurent-polynomial arithmetic in descending powers of x.

A term c * x^(-e) is stored at exponent e; e may be negative (so x^(+1)
is representable, which the large leading families need). Everything is
truncated above a working cap so products stay small.
"""

from __future__ import annotations

import numpy as np


class Laurent:
    __slots__ = ("e0", "coeffs", "cap")

    def __init__(self, e0: int, coeffs, cap: int):
        arr = np.asarray(coeffs, dtype=complex)
        # drop terms past the cap (exponent e0 + i <= cap)
        keep = cap - e0 + 1
        if keep <= 0:
            arr = np.zeros(1, dtype=complex)
            e0 = cap
        elif arr.size > keep:
            arr = arr[:keep]
        self.e0 = e0
        self.coeffs = arr
        self.cap = cap

    @classmethod
    def const(cls, c: complex, cap: int) -> "Laurent":
        return cls(0, [c], cap)

    @classmethod
    def x_power(cls, p: int, cap: int) -> "Laurent":
        """The monomial x^p (stored at exponent -p)."""
        return cls(-p, [1.0], cap)

    def __add__(self, other: "Laurent") -> "Laurent":
        e0 = min(self.e0, other.e0)
        end = max(self.e0 + self.coeffs.size, other.e0 + other.coeffs.size)
        out = np.zeros(end - e0, dtype=complex)
        out[self.e0 - e0: self.e0 - e0 + self.coeffs.size] += self.coeffs
        out[other.e0 - e0: other.e0 - e0 + other.coeffs.size] += other.coeffs
        return Laurent(e0, out, self.cap)

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "Laurent":
        return Laurent(self.e0, self.coeffs * c, self.cap)

    def __mul__(self, other: "Laurent") -> "Laurent":
        out = np.convolve(self.coeffs, other.coeffs)
        return Laurent(self.e0 + other.e0, out, self.cap)

    def diff(self) -> "Laurent":
        """d/dx: c x^(-e) -> -e c x^(-e-1)."""
        exps = self.e0 + np.arange(self.coeffs.size)
        return Laurent(self.e0 + 1, -exps * self.coeffs, self.cap)

    def coeff(self, e: int) -> complex:
        i = e - self.e0
        if 0 <= i < self.coeffs.size:
            return complex(self.coeffs[i])
        return 0.0 + 0.0j
