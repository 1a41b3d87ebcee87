"""Built-in transcriptions of the presentations, ideals, calculi and tables.

Entries live in ``data/*.txt`` (see :mod:`ekappa.catalog.format`).  Keys are
``kind.name`` (``algebra.etilde``, ``ideal.r0plus_tilde``, ``calculus.threeD``)
or ``table.<sub>.<name>`` for tables (``table.bracket.threeD``).  Entries with a
typo resolution keep both ``adopted`` and ``literal`` variants.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..hopf import HopfStructure
from ..ncalg import Alphabet, NCPoly, parse
from ..rewrite import Presentation
from ..scalar import K, SeriesScalar, mu_series
from .format import FormatError, Section, load_files, parse_sections, split_commutator, split_equation

__all__ = [
    "CatalogEntry",
    "Catalog",
    "get",
    "list_keys",
    "default_catalog",
    "FormatError",
    "Section",
    "parse_sections",
]

DATA = Path(__file__).with_name("data")

TABLE_KINDS = {
    "commutation": "commutation",
    "exterior": "exterior",
    "cartan": "cartan",
    "brackets": "bracket",
    "formstar": "formstar",
    "funcstar": "funcstar",
}
IDENTITY_KINDS = ("projection", "funcprojection", "dual", "expansion", "formdefs")
NAME_ALIASES = {"3d": "threeD", "4dplus": "fourDplus", "4dminus": "fourDminus", "3d_tilde": "threeD_tilde"}


def _spec_kind(kind: str) -> str:
    if kind in TABLE_KINDS:
        return "table"
    if kind in IDENTITY_KINDS:
        return "identity-set"
    if kind in ("covering", "contraction"):
        return "contraction"
    return kind


def _key(sec: Section) -> str:
    if sec.kind in TABLE_KINDS:
        return f"table.{TABLE_KINDS[sec.kind]}.{sec.name}"
    if sec.kind in IDENTITY_KINDS:
        return f"identity.{sec.kind}.{sec.name}"
    return f"{sec.kind}.{sec.name}"


@dataclass
class CatalogEntry:
    key: str
    kind: str
    section: Section
    variant: str
    catalog: "Catalog"

    @property
    def paper_location(self) -> str:
        return self.section.location

    @property
    def payload(self):
        return self.catalog.build(self.section)


class Catalog:
    """Parsed catalog with lazily built objects.

    ``mu`` selects how the SU_mu(2) parameter is bound: ``"series"`` (truncated
    exponential in t of order ``order``) or ``"exact"`` (the field variable is
    reinterpreted as mu; used by the exact contraction lattice).
    """

    def __init__(self, sections: Sequence[Section], order: int = 2):
        self.sections = list(sections)
        self.order = order
        self._index: Dict[Tuple[str, str], Section] = {}
        for s in self.sections:
            k = (_key(s), s.variant)
            if k in self._index:
                raise FormatError(f"duplicate section [{s.kind} {s.name} {s.variant}]", s.source)
            self._index[k] = s
        self._cache: dict = {}

    @classmethod
    def from_files(cls, paths: Sequence[Path], order: int = 2) -> "Catalog":
        return cls(load_files(paths), order=order)

    # lookup -----------------------------------------------------------------
    def _normalize(self, key: str) -> str:
        parts = key.split(".")
        parts[-1] = NAME_ALIASES.get(parts[-1].lower(), parts[-1])
        return ".".join(parts)

    def section(self, key: str, variant: str = "adopted") -> Section:
        key = self._normalize(key)
        hit = self._index.get((key, variant))
        if hit is None and variant == "adopted":
            hit = self._index.get((key, "adopted"))
        if hit is None:
            raise KeyError(f"unknown catalog entry {key!r} (variant {variant})")
        return hit

    def has(self, key: str, variant: str = "adopted") -> bool:
        return (self._normalize(key), variant) in self._index

    def variants(self, key: str) -> List[str]:
        key = self._normalize(key)
        return sorted(v for (k, v) in self._index if k == key)

    def get(self, key: str, variant: str = "adopted") -> CatalogEntry:
        sec = self.section(key, variant)
        return CatalogEntry(_key(sec), _spec_kind(sec.kind), sec, sec.variant, self)

    def list(self, kind: Optional[str] = None, include_aux: bool = False) -> List[str]:
        out = []
        seen = set()
        for s in self.sections:
            if s.meta.get("auxiliary") and not include_aux:
                continue
            if kind is None:
                k = _key(s)
            elif kind in (s.kind, _spec_kind(s.kind)):
                k = s.name if kind == s.kind else _key(s)
            else:
                continue
            if k not in seen:
                seen.add(k)
                out.append(k)
        return out

    # builders ---------------------------------------------------------------
    def build(self, sec: Section):
        k = (_key(sec), sec.variant)
        if k not in self._cache:
            builder = getattr(self, f"_build_{sec.kind}", None)
            self._cache[k] = builder(sec) if builder else sec
        return self._cache[k]

    def constants(self, mu: str = "series") -> dict:
        if mu == "series":
            return {"mu": mu_series(self.order), "t": SeriesScalar.t(self.order)}
        if mu == "exact":
            return {"mu": K}
        raise ValueError(f"unknown mu binding {mu!r}")

    def alphabet(self, name: str, mu: str = "series") -> Alphabet:
        key = ("alphabet", name, mu)
        if key not in self._cache:
            sec = self.section(f"algebra.{name}")
            gens = sec.meta.get("generators", "").split()
            pairs = []
            for chunk in sec.meta.get("star", "").split(";"):
                names = chunk.split()
                if len(names) == 2:
                    pairs.append(tuple(names))
                elif names:
                    raise sec.error(f"bad star pair {chunk!r}")
            consts = self.constants(mu) if "constants" in sec.meta else {}
            self._cache[key] = Alphabet(gens, pairs, consts)
        return self._cache[key]

    def presentation(self, name: str, mu: str = "series") -> Presentation:
        key = ("presentation", name, mu)
        if key not in self._cache:
            A = self.alphabet(name, mu)
            sec = self.section(f"relations.{name}")
            rels = []
            for no, lhs, rhs in sec.equations():
                try:
                    rels.append(parse(lhs, A) - parse(rhs, A))
                except ValueError as exc:
                    raise sec.error(str(exc), no) from None
            pres = Presentation.from_relations(A, rels, name=name)
            # close the rule set (SU_mu(2) needs one derived rule)
            rep = pres.check_confluence(6, complete=True)
            pres.completion_log = rep.completion_steps
            self._cache[key] = pres
        return self._cache[key]

    def hopf(self, name: str, mu: str = "series", validate: bool = True) -> HopfStructure:
        key = ("hopf", name, mu, validate)
        if key not in self._cache:
            pres = self.presentation(name, mu)
            A = pres.alphabet
            maps = {}
            for part in ("coproduct", "counit", "antipode"):
                sec = self.section(f"{part}.{name}")
                table = {}
                for no, lhs, rhs in sec.equations():
                    if lhs not in A.index:
                        raise sec.error(f"unknown generator {lhs!r}", no)
                    val = parse(rhs, A)
                    if part == "counit":
                        if not isinstance(val, NCPoly) or not val.is_scalar():
                            raise sec.error("counit value must be a scalar", no)
                        val = val.constant_term()
                    table[lhs] = val
                maps[part] = table
            self._cache[key] = HopfStructure(
                pres, maps["coproduct"], maps["counit"], maps["antipode"], name=name, validate=validate
            )
        return self._cache[key]

    def _build_algebra(self, sec: Section) -> HopfStructure:
        return self.hopf(sec.name)

    def ideal_generators(self, name: str, variant: str = "adopted", mu: str = "series") -> List[NCPoly]:
        sec = self.section(f"ideal.{name}", variant)
        alg = sec.meta["algebra"]
        pres = self.presentation(alg, mu)
        out = []
        for no, text in sec.lines:
            try:
                out.append(pres.normal_form(parse(text, pres.alphabet)))
            except ValueError as exc:
                raise sec.error(str(exc), no) from None
        return out

    def _build_ideal(self, sec: Section) -> List[NCPoly]:
        return self.ideal_generators(sec.name, sec.variant)

    def images(self, key: str, variant: str = "adopted", mu: str = "series") -> Tuple[str, str, Dict[str, NCPoly]]:
        """Generator images of a covering/contraction section: (source, target, images)."""
        sec = self.section(key, variant)
        src, tgt = sec.meta["source"], sec.meta["target"]
        A = self.alphabet(tgt, mu)
        # contraction images may use mu and t even if the target has no constants
        P = Alphabet(A.names, _pairs(A), {**self.constants(mu), **A.constants}) if mu == "series" else A
        out = {}
        for no, lhs, rhs in sec.equations():
            try:
                p = parse(rhs, P)
            except ValueError as exc:
                raise sec.error(str(exc), no) from None
            out[lhs] = NCPoly(p.terms, A)
        return src, tgt, out


    # calculi ------------------------------------------------------------------
    def two_form_relations(self, key: str, labels: Sequence[str], variant: str = "adopted", mu: str = "series"):
        """Scalar two-form relations of an exterior section, as dicts over label pairs."""
        from ..calculus import scalar_two_form

        sec = self.section(key, variant)
        consts = self.constants(mu)
        L = Alphabet(labels, (), consts)
        out = []
        for no, lhs, rhs in sec.equations():
            try:
                p = parse(lhs.replace("&", "*"), L) - parse(rhs.replace("&", "*"), L)
                out.append(scalar_two_form(p, labels))
            except ValueError as exc:
                raise sec.error(str(exc), no) from None
        return out

    def cartan_data(self, name: str, labels: Sequence[str]):
        from ..calculus import scalar_two_form

        sec = self.section(f"table.cartan.{name}")
        L = Alphabet(labels)
        out = {}
        for no, lhs, rhs in sec.equations():
            if lhs not in L.index:
                raise sec.error(f"unknown form {lhs!r}", no)
            try:
                out[L.index[lhs]] = scalar_two_form(parse(rhs.replace("&", "*"), L), labels) if rhs.strip() != "0" else {}
            except ValueError as exc:
                raise sec.error(str(exc), no) from None
        return out

    def calculus(self, name: str, variant: str = "adopted", exterior: str = "adopted", degree: int = 6):
        from ..calculus import Calculus

        key = ("calculus", name, variant, exterior, degree)
        if key not in self._cache:
            sec = self.section(f"calculus.{name}", variant)
            hopf = self.hopf(sec.meta["algebra"])
            A = hopf.alphabet
            labels = sec.meta["labels"].split()
            funcs = sec.meta.get("functionals", "").split() or None
            reps = {}
            for no, lhs, rhs in sec.equations():
                reps[lhs] = parse(rhs, A)
            if sorted(reps) != sorted(labels):
                raise sec.error("representatives do not match the labels")
            gens = self.ideal_generators(sec.meta["ideal"], "adopted")
            ext = None
            if self.has(f"table.exterior.{name}", exterior):
                ext = self.two_form_relations(f"table.exterior.{name}", labels, exterior)
            cm = self.cartan_data(name, labels) if self.has(f"table.cartan.{name}") else None
            self._cache[key] = Calculus(
                hopf, gens, labels, [reps[l] for l in labels], degree=degree, name=name,
                functional_names=funcs, exterior=ext, cartan=cm,
            )
        return self._cache[key]

    def _build_calculus(self, sec: Section):
        return self.calculus(sec.name, sec.variant)


def _pairs(A: Alphabet):
    return [(A.names[j], A.names[p]) for j, p in enumerate(A.partner) if j < p]


@lru_cache(maxsize=None)
def _default_sections() -> Tuple[Section, ...]:
    return tuple(load_files(sorted(DATA.glob("*.txt"))))


_DEFAULT: Dict[int, Catalog] = {}


def default_catalog(order: int = 2) -> Catalog:
    if order not in _DEFAULT:
        _DEFAULT[order] = Catalog(_default_sections(), order=order)
    return _DEFAULT[order]


def get(key: str, variant: str = "adopted") -> CatalogEntry:
    return default_catalog().get(key, variant)


def list_keys(kind: Optional[str] = None) -> List[str]:
    return default_catalog().list(kind)
