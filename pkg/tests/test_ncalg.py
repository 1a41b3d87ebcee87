import pytest
from hypothesis import given, strategies as st

from ekappa.ncalg import Alphabet, NCPoly, ParseError, parse, parse_tensor, star, substitute
from ekappa.scalar import I, ONE

A = Alphabet(["x", "xs", "y"], [("x", "xs")])
names = st.sampled_from(["x", "xs", "y", "1", "i", "(1/k)"])


@st.composite
def polys(draw):
    terms = draw(st.lists(st.lists(names, min_size=1, max_size=3), min_size=1, max_size=3))
    return parse(" + ".join(" ".join(t) for t in terms), A)


def test_parse_and_print():
    p = parse("x xs - (i/(2*k)) y^2 + 3", A)
    assert parse(p.to_text(), A) == p
    assert p.degree() == 2
    assert p.constant_term() == 3 * ONE


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse("x + zz", A)
    assert err.value.pos == 4
    with pytest.raises(ValueError):
        parse("x + (y", A)


@given(polys(), polys(), polys())
def test_free_algebra_laws(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == A.zero()


@given(polys(), polys())
def test_star_is_an_antilinear_antihomomorphism(p, q):
    assert star(star(p)) == p
    assert star(p * q) == star(q) * star(p)
    assert star(p.scale(I)) == star(p).scale(-I)


def test_selfadjoint_generator():
    y = parse("y", A)
    assert star(y) == y
    assert star(parse("x", A)) == parse("xs", A)


def test_tensor_parse():
    t = parse_tensor("x @ y + 1 @ 1", A)
    assert len(t.terms) == 2


def test_substitute():
    B = Alphabet(["u"])
    img = substitute(parse("x y", A), {"x": parse("u u", B), "xs": B.one(), "y": parse("u + 1", B)}, B)
    assert img == parse("u u u + u u", B)
