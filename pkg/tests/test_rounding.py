from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from antichains.rounding import (Interval, UpperReal, exact_digits, log2_exact_int, short_count,
                                 to_mpq)


def contains(iv, q):
    q = to_mpq(q)
    return iv.lo <= q <= iv.hi


def test_exact_construction_is_outward():
    iv = Interval(Fraction(1, 3), precision=53)
    assert iv.lo < iv.hi
    assert contains(iv, Fraction(1, 3))
    assert Interval(5).lo == Interval(5).hi == 5


def test_arithmetic_encloses_exact_result():
    a, b = Fraction(1, 3), Fraction(-2, 7)
    A, B = Interval(a, precision=40), Interval(b, precision=40)
    assert contains(A + B, a + b)
    assert contains(A - B, a - b)
    assert contains(A * B, a * b)
    assert contains(A / B, a / b)
    assert contains(-A, -a)
    assert contains(1 - A, 1 - a)
    assert contains(2 / A, 2 / a)


def test_functions_enclose():
    x = Interval(2, precision=64)
    with gmpy2.context(precision=256):
        s2 = gmpy2.sqrt(mpfr(2))
        l3 = gmpy2.log2(mpfr(3))
        s3 = gmpy2.sqrt(mpfr(3))
    assert x.sqrt().lo <= s2 <= x.sqrt().hi
    l = log2_exact_int(3, 64)
    assert l.lo <= l3 <= l.hi and l.hi - l.lo < 2**-60
    r3 = Interval(3, precision=64) ** Fraction(1, 2)
    assert r3.lo <= s3 <= r3.hi
    assert Interval(0).exp2().lo == 1


def test_power_rejects_inexact_exponent():
    with pytest.raises(ValueError):
        Interval(2) ** Fraction(1, 3)
    with pytest.raises(ZeroDivisionError):
        Interval(1) / Interval(-1, 1)
    with pytest.raises(ValueError):
        Interval(-1, 1).log2()


def test_certain_comparison():
    assert Interval(1, 2) <= Interval(2, 3)
    assert not Interval(1, 2.5) <= Interval(2, 3)


def test_upper_real():
    u = UpperReal(mpfr(7), 128)
    assert u.dominates(7) and u.dominates(Fraction(13, 2)) and not u.dominates(8)
    assert u.rel_diff(7) == 0
    assert u.decimal() == "7.0"


def test_digit_helpers():
    big = 3**20000
    assert exact_digits(big) == gmpy2.mpz(big).digits(10)
    assert short_count(12345) == "12345"
    assert short_count(big).endswith("(9543 digits)")
