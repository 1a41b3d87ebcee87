import pytest

from ekappa.contract import (
    ContractionError,
    ContractionMap,
    Covering,
    Laurent,
    check_counit_compatibility,
    check_star_equivariance,
    contract_ideal_from_catalog,
    covering_map,
    expand_forms,
    laurent_of,
    mat_inverse,
    printed_relations,
    verify_intersections,
    verify_limit_algebra,
    verify_projections,
)
from ekappa.scalar import K, ONE, ZERO, Scalar


@pytest.fixture(scope="module")
def cm(cat):
    return ContractionMap.from_catalog(cat, order=2)


def S(text):
    return Scalar.parse(text)


# Laurent expansions at mu = exp(t/k); K stands for mu here


def test_laurent_of_mu_minus_one():
    L = laurent_of(K - ONE, 6)
    assert L.valuation() == 1
    assert L.at(1) == S("1/k") and L.at(2) == S("1/(2*k^2)") and L.at(3) == S("1/(6*k^3)")


def test_laurent_bernoulli_oracle():
    # 1/(e^s - 1) = 1/s - 1/2 + s/12 - s^3/720 + ..., s = t/k
    L = laurent_of((K - ONE).inverse(), 8)
    assert L.valuation() == -1
    assert [L.at(j) for j in (-1, 0, 1, 2, 3)] == [K, S("-1/2"), S("1/(12*k)"), ZERO, S("-1/(720*k^3)")]
    with pytest.raises(ContractionError):
        L.at(L.prec)


def test_laurent_arithmetic_precision():
    a = laurent_of((K - ONE).inverse(), 8)
    b = laurent_of(K - ONE, 8)
    prod = a * b
    assert prod.at(0) == ONE
    assert all(prod.at(j) == ZERO for j in range(1, prod.prec))
    assert (a + Laurent({0: ONE}, 3)).prec == 3


def test_mat_inverse():
    M = [[ONE, S("i")], [ZERO, K]]
    Mi = mat_inverse(M)
    prod = [[sum((M[i][k] * Mi[k][j] for k in range(2)), ZERO) for j in range(2)] for i in range(2)]
    assert prod == [[ONE, ZERO], [ZERO, ONE]]


# the limit algebra


def test_limit_algebra_residues(cat, cm):
    rels = printed_relations(cat)
    assert len(rels) == 5
    rep = verify_limit_algebra(cm, rels, orders=1)
    assert rep.passed == len(rep.residues) == 10


def test_t2_residues_are_not_claimed(cat, cm):
    # beyond t^1 the relations need not vanish; the order-2 map must still refuse t^3
    with pytest.raises(ContractionError):
        cm.expand(printed_relations(cat)[0][1], 3)


def test_star_and_counit(cm):
    assert check_star_equivariance(cm, 2, 1).ok
    assert check_counit_compatibility(cm).ok


def test_order_one_map_is_enough(cat):
    cm1 = ContractionMap.from_catalog(cat, order=1)
    assert verify_limit_algebra(cm1, printed_relations(cat), orders=1).ok


# ideals


@pytest.mark.parametrize("which,dim", [("3D", 10), ("4D+", 9), ("4D-", 9)])
def test_ideal_contraction_degree_2(cat, cm, which, dim):
    rep = contract_ideal_from_catalog(which, 2, cat, cm=cm)
    assert rep.ok, rep.to_json()
    assert rep.limit_dim == rep.claimed_dim == dim


def test_literal_mu_star_reading_fails(cat, cm):
    rep = contract_ideal_from_catalog("3D", 4, cat, source_variant="literal", cm=cm, naive=False)
    assert not rep.ok
    assert (rep.limit_dim, rep.claimed_dim) == (53, 51)


def test_naive_limits_are_informational(cat, cm):
    rep = contract_ideal_from_catalog("3D", 2, cat, cm=cm)
    assert rep.naive and {s.scale for s in rep.naive} <= {0, 1, 2}
    assert rep.to_json()["naive_scaled_limits"]


# covering map, projections, intersections


def test_covering(cat):
    cov = Covering(cat)
    assert cov.check_homomorphism().ok
    assert not Covering(cat, "literal").check_homomorphism().ok
    E = cov.source
    assert covering_map(E.parse("A"), cat=cat) == cov.target.parse("a0^2")
    assert covering_map(E.parse("A As"), cat=cat) == cov.target.parse("1")


def test_projection_forms(cat):
    rep = verify_projections(cat, deg=2)
    by = {o.name: o for o in rep.outcomes}
    assert by["projection.threeD.forms"].ok
    assert by["projection.fourDplus.forms"].ok
    assert not by["projection.fourDminus.forms"].ok
    assert "omm" in by["projection.fourDminus.forms"].witness


def test_intersections_degree_2(cat):
    rep = verify_intersections(2, cat)
    assert rep.ok and rep.corollary_ok
    assert rep.dims == {"r0plus_tilde": 9, "r0minus_tilde": 9}
    assert rep.generators[0] == "As + A - 2"
    assert len(rep.generators) == 5
    low = verify_intersections(1, cat, corollary=False)
    assert low.dims == {"r0plus_tilde": 1, "r0minus_tilde": 1} and low.generators == ["As + A - 2"]


def test_form_expansion(cat, cm):
    rep = expand_forms(cm, cat)
    assert rep.reproduces and rep.obtained_rank == rep.printed_rank == 6
    assert rep.source_rank == 6
    # leading parts agree with the printed ones, the t^1 p0 parts do not
    assert all(not m.startswith(("O0 t^0", "O1 t^0", "O2 t^0")) for m in rep.mismatches)
    assert any(m.startswith("O0 t^1") for m in rep.mismatches)
    assert not expand_forms(cm, cat, exterior_variant="literal").reproduces
