from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lienorm.errors import DivisionByZero, ParseError
from lienorm.scalar import I, ONE, ZERO, GaussianRational as Q, parse_scalar

fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f.numerator) < 10 ** 6)
gaussians = st.builds(Q, fractions, fractions)


@pytest.mark.parametrize("text, canon", [
    ("3/2+1/2i", "3/2+1/2i"), ("6/4 + 2/4 i", "3/2+1/2i"), ("-1", "-1"), ("i", "1i"),
    ("-i", "-1i"), ("-1/2i", "-1/2i"), ("0/5i", "0"), ("0", "0"), ("7/-14", None),
    ("2-3i", "2-3i"), ("+5", "5"),
])
def test_canonical_strings(text, canon):
    if canon is None:
        with pytest.raises(ParseError):
            parse_scalar(text)
    else:
        assert str(parse_scalar(text)) == canon


@pytest.mark.parametrize("text", ["", "1/0", "1+", "abc", "1//2", "1i+1i", "1.5"])
def test_bad_strings_report_position(text):
    with pytest.raises(ParseError) as info:
        parse_scalar(text)
    assert info.value.position is not None


def test_product_with_conjugate():
    a = Q(Fraction(1, 2), Fraction(1, 2))
    assert a * a.conjugate() == Q(Fraction(1, 2))
    assert a * a.inverse() == ONE
    assert I * I == -ONE


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        ONE / ZERO
    with pytest.raises(DivisionByZero):
        ZERO.inverse()


def test_real_values_hash_like_fractions():
    assert hash(Q(Fraction(3, 4))) == hash(Fraction(3, 4))
    assert Q(2) == 2 and Q(Fraction(1, 3)) == Fraction(1, 3)


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a


@given(gaussians)
def test_round_trip_through_text(a):
    assert parse_scalar(str(a)) == a
    assert complex(a) == pytest.approx(complex(float(a.real), float(a.imag)))
