from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ekappa.scalar import I, K, ONE, ZERO, Scalar, SeriesScalar, mu_inverse_series, mu_series, series_coeff

small = st.integers(-6, 6)


@st.composite
def scalars(draw):
    # (a + b i + c k) / (d + k^e), a dense enough family of Q(i)(k)
    a, b, c = draw(small), draw(small), draw(small)
    d = draw(st.integers(1, 4))
    e = draw(st.integers(0, 2))
    return (Scalar.from_fraction(a, b) + c * K) / (Scalar.from_fraction(d) + K ** e)


@given(scalars(), scalars(), scalars())
def test_field_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == ZERO


@given(scalars())
def test_inverse_and_conjugation(x):
    if x:
        assert x * x.inverse() == ONE
    assert x.conj().conj() == x
    assert (x * x.conj()).is_real()


@given(scalars(), scalars())
def test_equality_is_structural(x, y):
    # canonical form: equal values hash equal
    if x == y:
        assert hash(x) == hash(y)
    assert hash((x * y) / y if y else x) == hash(x)


def test_text_round_trip():
    for text in ["1", "-1/2", "i/(2*k)", "(k - i)/(k^2 + 1)", "-(i*k/2)", "5/(8*k)"]:
        s = Scalar.parse(text)
        assert Scalar.parse(s.to_text()) == s


def test_i_squared_and_kappa():
    assert I * I == -ONE
    assert Scalar.kappa_power(-2) * K * K == ONE
    assert Scalar.from_fraction(Fraction(1, 3)) * 3 == ONE


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_mu_series_is_exponential():
    m = mu_series(4)
    assert series_coeff(m, 3) == Scalar.parse("1/(6*k^3)")
    assert m * mu_inverse_series(4) == SeriesScalar.constant(ONE, 4)
    assert m.inverse() == mu_inverse_series(4)


def test_series_truncation():
    t = SeriesScalar.t(2)
    assert t ** 3 == SeriesScalar.constant(ZERO, 2)
    with pytest.raises(IndexError):
        series_coeff(t, 3)
    with pytest.raises(ZeroDivisionError):
        t.inverse()


@given(st.lists(small, min_size=1, max_size=4), st.lists(small, min_size=1, max_size=4))
def test_series_ring(a, b):
    x = SeriesScalar([1] + a, 3)
    y = SeriesScalar([2] + b, 3)
    assert x * y == y * x
    assert (x / y) * y == x
