"""Directed-rounding arithmetic on top of MPFR (via gmpy2).

``UpperReal`` carries a value that is guaranteed to be >= the exact real it
stands for.  ``Interval`` keeps a lower and an upper endpoint computed with
downward and upward rounding respectively, which makes composite closed-form
expressions (with subtractions and divisions) sound in both directions.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq

DEFAULT_PRECISION = 128


def up(precision=DEFAULT_PRECISION):
    return gmpy2.context(gmpy2.get_context(), precision=precision, round=gmpy2.RoundUp)


def down(precision=DEFAULT_PRECISION):
    return gmpy2.context(gmpy2.get_context(), precision=precision, round=gmpy2.RoundDown)


def nearest(precision=DEFAULT_PRECISION):
    return gmpy2.context(gmpy2.get_context(), precision=precision, round=gmpy2.RoundToNearest)


def to_mpq(x):
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def format_up(x, digits=6):
    return format(x, f".{digits}Ug")


def format_down(x, digits=6):
    return format(x, f".{digits}Dg")


def exact_digits(value):
    """Decimal string of an integer of any size (bypasses the int-to-str digit limit)."""
    return gmpy2.mpz(value).digits(10)


def short_count(value, max_digits=40):
    """Exact decimal for moderate integers, otherwise a 6-digit mantissa with the digit count."""
    digits = gmpy2.mpz(value).num_digits(10)
    if digits <= max_digits:
        return exact_digits(value)
    with nearest(64):
        return f"{format(mpfr(value), '.6g')} ({exact_digits(value).__len__()} digits)"


@dataclass(frozen=True)
class UpperReal:
    """An MPFR value known to dominate the exact quantity it represents."""

    value: object
    precision_bits: int = DEFAULT_PRECISION

    def __float__(self):
        return float(self.value)

    def dominates(self, exact):
        """True when ``exact`` (int/Fraction/mpfr) is <= this value, compared exactly."""
        if isinstance(exact, (int, Fraction)):
            exact = to_mpq(exact)
        return exact <= self.value

    def decimal(self, digits=6):
        return format_up(self.value, digits)

    def rel_diff(self, exact):
        """|value - exact| / |exact| evaluated at working precision."""
        with nearest(self.precision_bits + 32):
            e = mpfr(to_mpq(exact)) if isinstance(exact, (int, Fraction)) else mpfr(exact)
            return abs(self.value - e) / abs(e)


class Interval:
    """Closed interval [lo, hi] with outward rounding at fixed precision."""

    __slots__ = ("lo", "hi", "precision")

    def __init__(self, lo, hi=None, precision=DEFAULT_PRECISION):
        self.precision = precision
        if hi is None:
            hi = lo
        if isinstance(lo, (int, Fraction)) or isinstance(lo, type(mpq())):
            with down(precision):
                lo = mpfr(to_mpq(lo)) if not isinstance(lo, int) else mpfr(lo)
        if isinstance(hi, (int, Fraction)) or isinstance(hi, type(mpq())):
            with up(precision):
                hi = mpfr(to_mpq(hi)) if not isinstance(hi, int) else mpfr(hi)
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, x, precision=DEFAULT_PRECISION):
        return cls(x, x, precision)

    def _lift(self, other):
        if isinstance(other, Interval):
            return other
        return Interval(other, other, self.precision)

    def _make(self, lo_fn, hi_fn):
        with down(self.precision):
            lo = lo_fn()
        with up(self.precision):
            hi = hi_fn()
        return Interval(lo, hi, self.precision)

    def __add__(self, other):
        o = self._lift(other)
        return self._make(lambda: self.lo + o.lo, lambda: self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.precision)

    def __sub__(self, other):
        o = self._lift(other)
        return self._make(lambda: self.lo - o.hi, lambda: self.hi - o.lo)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return self._make(lambda: min(a * b for a, b in pairs),
                          lambda: max(a * b for a, b in pairs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return self._make(lambda: min(a / b for a, b in pairs),
                          lambda: max(a / b for a, b in pairs))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def _monotone(self, fn):
        return self._make(lambda: fn(self.lo), lambda: fn(self.hi))

    def sqrt(self):
        return self._monotone(gmpy2.sqrt)

    def log2(self):
        if self.lo <= 0:
            raise ValueError("log2 of a non-positive interval")
        return self._monotone(gmpy2.log2)

    def exp(self):
        return self._monotone(gmpy2.exp)

    def exp2(self):
        return self._monotone(gmpy2.exp2)

    def __pow__(self, e):
        """Power with an exponent that is exact in binary (int or dyadic Fraction)."""
        if self.lo < 0:
            raise ValueError("power of an interval with negative values")
        if isinstance(e, Fraction):
            if e.denominator & (e.denominator - 1):
                raise ValueError(f"exponent {e} is not exactly representable")
            e = mpfr(to_mpq(e))
        if e < 0:
            raise ValueError("negative exponents are not supported")
        return self._monotone(lambda x: x ** e)

    @property
    def mid(self):
        with nearest(self.precision):
            return (self.lo + self.hi) / 2

    def __le__(self, other):
        """Certainly <=: every point of self is <= every point of other."""
        o = self._lift(other)
        return self.hi <= o.lo

    def __repr__(self):
        return f"Interval({format_down(self.lo, 10)}, {format_up(self.hi, 10)})"


def log2_exact_int(value, precision=DEFAULT_PRECISION):
    """Interval enclosing log2 of a positive integer."""
    return Interval(value, value, precision).log2()
