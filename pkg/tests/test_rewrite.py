import pytest
from hypothesis import given, strategies as st

from ekappa.ncalg import Alphabet, NCPoly, parse
from ekappa.rewrite import (
    OrientationError,
    Presentation,
    orient,
    quotient_report,
    right_ideal_span,
)
from ekappa.scalar import ONE


@st.composite
def words_in(draw, pres, maxlen=4):
    names = pres.alphabet.names
    w = draw(st.lists(st.sampled_from(names), min_size=0, max_size=maxlen))
    c = draw(st.sampled_from(["1", "-2", "i", "(1/k)"]))
    return parse(c + (" " + " ".join(w) if w else ""), pres.alphabet)


def _etilde():
    from ekappa.catalog import default_catalog

    return default_catalog().presentation("etilde")


E = _etilde()


def test_normal_forms_etilde():
    assert E.parse("a0 a0s").to_text() == "1"
    assert E.parse("a0s a0").to_text() == "1"
    # w0 moves to the right of a0
    assert E.parse("w0 a0") == E.parse("a0 w0 - (1/(2*k)) a0^2 + 1/(2*k)")


def test_normal_forms_ekappa(cat):
    Ek = cat.presentation("ekappa")
    assert Ek.parse("v- v+").to_text() == "v+ v- - (i/k) v- + (i/k) v+"
    assert Ek.parse("A As").to_text() == "1"


@given(words_in(E), words_in(E))
def test_normal_form_is_multiplicative(p, q):
    nf = E.normal_form
    assert nf(nf(p) * nf(q)) == nf(p * q)
    assert nf(nf(p)) == nf(p)


@given(words_in(E, 5))
def test_normal_form_is_normal(p):
    for w in E.normal_form(p).terms:
        assert E.is_normal(w)


@pytest.mark.parametrize("name", ["etilde", "ekappa", "ekappa_dual", "su_mu2"])
def test_confluent_to_degree_6(cat, name):
    rep = cat.presentation(name).check_confluence(6)
    assert rep.ok, rep.unresolved[:1]


def test_completion_adds_missing_rules():
    A = Alphabet(["x", "y"])
    pres = Presentation.from_relations(A, ["y x = x", "x x = y"], name="toy")
    rep = pres.check_confluence(4)
    assert not rep.ok
    assert rep.unresolved[0]["word"] == "y x x"
    done = pres.check_confluence(4, complete=True)
    assert done.ok
    assert done.completion_steps == ["added y y -> y from overlap y x x", "added x y -> x from overlap x x x"]


def test_orientation():
    A = Alphabet(["x", "y"])
    r = orient(parse("y x - x y", A))
    assert A.word_text(r.lhs) == "y x"
    with pytest.raises(OrientationError):
        orient(parse("0", A))


def test_basis_words_counts():
    # etilde: PBW-type basis a0^m w0^a w0s^b, m in Z; count of words of length <= 2
    words = E.basis_words(2)
    assert words[0] == ()
    assert all(E.is_normal(w) for w in words)
    assert len(E.basis_words(1)) == 5


def test_right_ideal_and_quotient(cat):
    Ek = cat.hopf("ekappa")
    gens = cat.ideal_generators("r0_ekappa")
    R = right_ideal_span(gens, Ek.base, 3)
    for g in gens:
        assert R.member(Ek.normal_form(g))
    reps = [Ek.parse(t) for t in ("A - As", "v+", "v-")]
    q = quotient_report(Ek.base, gens, Ek.counit, 4, reps)
    assert q.dimension == 3 and q.representatives_ok
    bad = quotient_report(Ek.base, gens, Ek.counit, 4, [Ek.parse("v+"), Ek.parse("v+")])
    assert not bad.representatives_ok and "dependent" in bad.witness
