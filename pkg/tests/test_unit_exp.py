from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ltphigamma.errors import DenominatorDivisibleByP, NotAOneUnit
from ltphigamma.ffield import GF
from ltphigamma.series import TSeries, series_from_ints
from ltphigamma.unit_exp import PExponent, one_unit_pow, padic_digits

F4 = GF(2, 2)


def test_digit_examples():
    assert padic_digits(PExponent.of(5, 2), 6) == [1, 0, 1, 0, 0, 0]
    assert padic_digits(PExponent.of(-1, 3), 5) == [2] * 5
    assert padic_digits(PExponent.of(Fraction(1, 3), 2), 4) == [1, 1, 0, 1]
    with pytest.raises(DenominatorDivisibleByP):
        PExponent.of(Fraction(1, 2), 2)


@given(st.integers(-10**6, 10**6), st.integers(1, 500), st.sampled_from([2, 3, 5]), st.integers(1, 12))
def test_digits_reconstruct_the_fraction(num, den, p, count):
    if den % p == 0:
        den += 1
    s = PExponent.of(Fraction(num, den), p)
    digits = padic_digits(s, count)
    value = sum(d * p**i for i, d in enumerate(digits))
    assert all(0 <= d < p for d in digits)
    assert (s.den * value - s.num) % p**count == 0


def test_trivial_exponents():
    f = series_from_ints(3, [1, 2, 0, 1], 20)
    assert one_unit_pow(f, 0) == TSeries.one(GF(3), 20)
    assert one_unit_pow(f, 1) == f


def test_inverse_and_cube_root():
    f = series_from_ints(2, [1, 1], 30)
    assert one_unit_pow(f, -1) == f.invert_unit()
    g = one_unit_pow(f, Fraction(1, 3), 8)
    assert (g**3).agrees(f, 8)


one_units = st.lists(st.integers(0, 3), min_size=1, max_size=40).map(
    lambda cs: TSeries.from_list(F4, [1] + [F4.from_code(c) for c in cs], 40))
exponents = st.fractions(max_denominator=50).filter(lambda s: s.denominator % 2)


@given(one_units, exponents)
def test_power_matches_integer_oracle(f, s):
    """(f^s)^den = f^num: the oracle only uses integer powers."""
    s = Fraction(s)
    g = one_unit_pow(f, s, 40)
    lhs = g ** s.denominator
    rhs = f ** abs(s.numerator)
    if s.numerator < 0:
        rhs = rhs.invert_unit()
    assert lhs.agrees(rhs, 40)


@given(one_units, exponents, exponents)
def test_exponent_laws(f, s, r):
    a = one_unit_pow(f, s, 30) * one_unit_pow(f, r, 30)
    assert a.agrees(one_unit_pow(f, s + r, 30), 30)
    b = one_unit_pow(one_unit_pow(f, s, 30), r, 30)
    assert b.agrees(one_unit_pow(f, s * r, 30), 30)


def test_requires_one_unit():
    with pytest.raises(NotAOneUnit):
        one_unit_pow(series_from_ints(3, [2, 1], 10), Fraction(1, 2))
    with pytest.raises(NotAOneUnit):
        one_unit_pow(series_from_ints(3, [0, 1], 10), 2)
