import pytest

from ekappa.catalog import Catalog, FormatError, default_catalog, get, list_keys, parse_sections
from ekappa.catalog.format import split_commutator, split_d_terms, split_equation
from ekappa.cli import _export_text


def test_keys_and_variants(cat):
    keys = list_keys()
    assert "algebra.etilde" in keys and "ideal.r0plus_tilde" in keys and "table.bracket.threeD" in keys
    assert cat.variants("table.exterior.threeD") == ["adopted", "literal"]
    assert cat.variants("covering.ekappa") == ["adopted", "literal"]
    assert get("calculus.3d").section.name == "threeD"  # alias
    # auxiliary entries are hidden by default
    assert "calculus.threeD_tilde" not in keys
    assert "calculus.threeD_tilde" in cat.list(include_aux=True)


def test_every_entry_has_a_location(cat):
    for key in cat.list(include_aux=True):
        if key.split(".")[0] in ("relations", "coproduct", "counit", "antipode"):
            continue
        assert cat.get(key).paper_location, key


def test_unknown_entry(cat):
    with pytest.raises(KeyError):
        cat.section("ideal.nope")


def test_format_errors():
    with pytest.raises(FormatError) as err:
        parse_sections("x = y\n[algebra a]\n", "f.txt")
    assert "f.txt:1" in str(err.value)
    secs = parse_sections("[relations a]\nx y = y x = 1\n")
    with pytest.raises(FormatError):
        secs[0].equations()
    with pytest.raises(FormatError):
        Catalog(parse_sections("[ideal r]\nx\n[ideal r]\ny\n"))


def test_splitters():
    assert split_equation("[x, y] = x (1/2)") == ("[x, y]", "x (1/2)")
    with pytest.raises(ValueError):
        split_equation("a = b = c")
    assert split_commutator("[chi1, chi0]") == ("chi1", "chi0")
    assert split_commutator("chi1") is None
    assert split_d_terms("As d[v+] - (1/mu) s d[r]") == [("As", "v+"), ("- (1/mu) s", "r")]
    with pytest.raises(ValueError):
        split_d_terms("x d[y")


def test_user_presentation_file(tmp_path):
    f = tmp_path / "toy.txt"
    f.write_text(
        "[algebra toy]\n@generators g gi\n@star g gi\n"
        "[relations toy]\ng gi = 1\ngi g = 1\n"
        "[coproduct toy]\ng = g @ g\ngi = gi @ gi\n"
        "[counit toy]\ng = 1\ngi = 1\n"
        "[antipode toy]\ng = gi\ngi = g\n"
    )
    c = Catalog.from_files([f])
    h = c.hopf("toy")
    assert h.check_axioms(3).ok
    assert h.parse("g g gi").to_text() == "g"


def test_export_round_trip(cat):
    text = _export_text(cat)
    again = Catalog(parse_sections(text, "export"))
    assert [(s.kind, s.name, s.variant, s.meta, [t for _, t in s.lines]) for s in again.sections] == [
        (s.kind, s.name, s.variant, s.meta, [t for _, t in s.lines]) for s in cat.sections
    ]
