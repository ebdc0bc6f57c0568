"""Gaussian rational scalars.

Real coefficients stay plain ``Fraction`` objects; a ``GaussianRational`` is
only materialized when the imaginary part is nonzero, and every operation
collapses back to ``Fraction`` when it can. That keeps the real case as fast as
stdlib rationals while one kernel serves both fields.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, "GaussianRational"]


class GaussianRational:
    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # construction ---------------------------------------------------------
    @staticmethod
    def make(re, im) -> Scalar:
        """Canonical scalar: a Fraction when im == 0."""
        re = Fraction(re)
        im = Fraction(im)
        if im == 0:
            return re
        return GaussianRational(re, im)

    # arithmetic -----------------------------------------------------------
    def _parts(self, other):
        if isinstance(other, GaussianRational):
            return other.re, other.im
        if isinstance(other, (int, Rational)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational.make(self.re + p[0], self.im + p[1])

    __radd__ = __add__

    def __sub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational.make(self.re - p[0], self.im - p[1])

    def __rsub__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational.make(p[0] - self.re, p[1] - self.im)

    def __mul__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = p
        return GaussianRational.make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        c, d = p
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b = self.re, self.im
        return GaussianRational.make((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return GaussianRational(*p) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return 1 / (self ** (-k))
        out: Scalar = Fraction(1)
        base: Scalar = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational.make(self.re, -self.im)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        p = self._parts(other)
        if p is None:
            return NotImplemented
        return self.re == p[0] and self.im == p[1]

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"


def to_scalar(c) -> Scalar:
    """Coerce int / Fraction / GaussianRational / exact complex to a canonical scalar."""
    if isinstance(c, GaussianRational):
        return GaussianRational.make(c.re, c.im)
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


def is_real(c: Scalar) -> bool:
    return not isinstance(c, GaussianRational)


def re_im(c: Scalar) -> tuple[Fraction, Fraction]:
    if isinstance(c, GaussianRational):
        return c.re, c.im
    return Fraction(c), Fraction(0)


def conj(c: Scalar) -> Scalar:
    return c.conjugate() if isinstance(c, GaussianRational) else c
