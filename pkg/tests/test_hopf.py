import pytest
from hypothesis import given, strategies as st

from ekappa.hopf import HopfStructure, WellDefinednessError
from ekappa.ncalg import Alphabet, NCPoly, TensorPoly, parse, parse_tensor
from ekappa.rewrite import Presentation
from ekappa.scalar import ONE, ZERO


@pytest.mark.parametrize("name", ["etilde", "ekappa", "ekappa_dual"])
def test_axioms_degree_3(cat, name):
    rep = cat.hopf(name).check_axioms(3)
    assert rep.ok, rep.to_json()
    assert set(rep.results) >= {"coassociativity", "counit", "antipode", "star_coproduct", "well_definedness"}


def test_su_mu2_exact_mu(cat):
    # mu bound exactly (the field variable read as mu)
    assert cat.hopf("su_mu2", mu="exact").check_axioms(3).ok


def test_group_like(cat):
    h = cat.hopf("etilde")
    a0 = h.parse("a0")
    assert h.coproduct(a0) == parse_tensor("a0 @ a0", h.alphabet)
    assert h.counit(a0) == ONE
    assert h.antipode(a0) == h.parse("a0s")


def test_broken_coproduct_is_rejected():
    # x y = y x with a non-cocommutative, inconsistent coproduct
    A = Alphabet(["x", "y"])
    pres = Presentation.from_relations(A, ["y x = x y + x"])
    cop = {"x": parse_tensor("x @ 1 + 1 @ x", A), "y": parse_tensor("y @ y", A)}
    eps = {"x": ZERO, "y": ONE}
    S = {"x": parse("-x", A), "y": parse("y", A)}
    with pytest.raises(WellDefinednessError):
        HopfStructure(pres, cop, eps, S)
    h = HopfStructure(pres, cop, eps, S, validate=False)
    assert not h.check_axioms(2).ok


_E = None


def _etilde():
    global _E
    if _E is None:
        from ekappa.catalog import default_catalog

        _E = default_catalog().hopf("etilde")
    return _E


@st.composite
def elements(draw):
    h = _etilde()
    w = draw(st.lists(st.sampled_from(h.alphabet.names), max_size=3))
    c = draw(st.sampled_from(["1", "i", "(1/k)", "-3"]))
    return h.parse(c + (" " + " ".join(w) if w else ""))


@given(elements(), elements())
def test_coproduct_and_counit_are_homomorphisms(p, q):
    h = _etilde()
    pq = h.normal_form(p * q)
    assert h.counit(pq) == h.counit(p) * h.counit(q)
    lhs = h.coproduct(pq)
    rhs = h.base.nf_tensor(h.coproduct(p) * h.coproduct(q))
    assert lhs == rhs


@given(elements(), elements())
def test_antipode_is_antihomomorphism(p, q):
    h = _etilde()
    assert h.antipode(h.normal_form(p * q)) == h.normal_form(h.antipode(q) * h.antipode(p))
