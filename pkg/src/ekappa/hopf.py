"""Hopf structures on presentations and the axiom battery.

Generator data (coproduct, counit, antipode) is extended homomorphically
(anti-homomorphically for S) and reduced with the presentation's rules.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .ncalg import UNIT, NCPoly, TensorPoly, Word, star, star_tensor, word_key
from .rewrite import Presentation
from .scalar import ONE, ZERO

log = logging.getLogger(__name__)

__all__ = ["HopfStructure", "AxiomReport", "AxiomResult", "check_hopf_axioms", "WellDefinednessError"]


class WellDefinednessError(ValueError):
    """A defining relation is not mapped to zero by the Hopf data."""


Triple = Tuple[Word, Word, Word]


def _add(acc: dict, key, c) -> None:
    old = acc.get(key)
    v = c if old is None else old + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


@dataclass
class AxiomResult:
    name: str
    passed: int = 0
    failed: int = 0
    witness: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, witness: str = "") -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.witness is None:
                self.witness = witness


@dataclass
class AxiomReport:
    algebra: str
    degree: int
    results: Dict[str, AxiomResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    def result(self, name: str) -> AxiomResult:
        if name not in self.results:
            self.results[name] = AxiomResult(name)
        return self.results[name]

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "degree": self.degree,
            "ok": self.ok,
            "axioms": {
                k: {"passed": r.passed, "failed": r.failed, "witness": r.witness}
                for k, r in sorted(self.results.items())
            },
        }


class HopfStructure:
    """Coproduct, counit and antipode given on generators of a presentation.

    ``coproduct``/``counit``/``antipode`` map generator names (or ids) to
    TensorPoly / scalar / NCPoly.  Construction verifies that every defining
    relation is sent to zero; pass ``validate=False`` to inspect broken data.
    """

    def __init__(
        self,
        base: Presentation,
        coproduct: Mapping,
        counit: Mapping,
        antipode: Mapping,
        name: str = "",
        validate: bool = True,
    ):
        self.base = base
        self.alphabet = base.alphabet
        self.name = name or base.name
        A = self.alphabet

        def ids(m: Mapping) -> dict:
            return {A.index[k] if isinstance(k, str) else k: v for k, v in m.items()}

        self._delta_gen: Dict[int, TensorPoly] = {j: base.nf_tensor(v) for j, v in ids(coproduct).items()}
        self._eps_gen = ids(counit)
        self._s_gen: Dict[int, NCPoly] = {j: base.normal_form(v) for j, v in ids(antipode).items()}
        for table, label in ((self._delta_gen, "coproduct"), (self._eps_gen, "counit"), (self._s_gen, "antipode")):
            missing = set(range(len(A))) - set(table)
            if missing:
                raise ValueError(f"{label} missing for {[A.names[j] for j in sorted(missing)]}")
        self._delta_memo: Dict[Word, TensorPoly] = {UNIT: TensorPoly.unit(A)}
        self._s_memo: Dict[Word, NCPoly] = {UNIT: A.one()}
        if validate:
            bad = self.well_definedness()
            if bad:
                raise WellDefinednessError("; ".join(bad))

    # extensions -------------------------------------------------------------
    def delta_word(self, w: Word) -> TensorPoly:
        hit = self._delta_memo.get(w)
        if hit is None:
            hit = self.base.nf_tensor(self.delta_word(w[:-1]) * self._delta_gen[w[-1]])
            self._delta_memo[w] = hit
        return hit

    def coproduct(self, p: NCPoly) -> TensorPoly:
        acc: dict = {}
        for w, c in p.terms.items():
            for k, d in self.delta_word(w).terms.items():
                _add(acc, k, c * d)
        return TensorPoly(acc, self.alphabet)

    def counit_word(self, w: Word):
        out = ONE
        for j in w:
            out = out * self._eps_gen[j]
            if not out:
                return ZERO
        return out

    def counit(self, p: NCPoly):
        out = ZERO
        for w, c in p.terms.items():
            e = self.counit_word(w)
            if e:
                out = c * e + out
        return out

    def antipode_word(self, w: Word) -> NCPoly:
        hit = self._s_memo.get(w)
        if hit is None:
            # S(w x) = S(x) S(w)
            hit = self.base.normal_form(self._s_gen[w[-1]] * self.antipode_word(w[:-1]))
            self._s_memo[w] = hit
        return hit

    def antipode(self, p: NCPoly) -> NCPoly:
        acc: dict = {}
        for w, c in p.terms.items():
            for v, d in self.antipode_word(w).terms.items():
                _add(acc, v, c * d)
        return NCPoly(acc, self.alphabet)

    def normal_form(self, p: NCPoly) -> NCPoly:
        return self.base.normal_form(p)

    def parse(self, text: str):
        return self.base.parse(text)

    # derived maps used by the battery ---------------------------------------
    def _delta_left(self, t: TensorPoly) -> Dict[Triple, object]:
        """(Delta (x) id) t as a dict over word triples."""
        acc: dict = {}
        for (w1, w2), c in t.terms.items():
            for (u1, u2), d in self.delta_word(w1).terms.items():
                _add(acc, (u1, u2, w2), c * d)
        return acc

    def _delta_right(self, t: TensorPoly) -> Dict[Triple, object]:
        acc: dict = {}
        for (w1, w2), c in t.terms.items():
            for (u1, u2), d in self.delta_word(w2).terms.items():
                _add(acc, (w1, u1, u2), c * d)
        return acc

    def _mult(self, t: TensorPoly, left_s: bool) -> NCPoly:
        """m (S (x) id) t  or  m (id (x) S) t."""
        acc = self.alphabet.zero()
        A = self.alphabet
        for (w1, w2), c in t.terms.items():
            if left_s:
                prod = self.antipode_word(w1) * NCPoly({w2: ONE}, A)
            else:
                prod = NCPoly({w1: ONE}, A) * self.antipode_word(w2)
            acc = acc + c * prod
        return self.base.normal_form(acc)

    # checks ---------------------------------------------------------------
    def well_definedness(self) -> List[str]:
        """Images of every defining relation under Delta, eps, S; returns failures."""
        A = self.alphabet
        bad = []
        for rule in self.base.rules:
            rel = NCPoly({rule.lhs: ONE}, A) - rule.rhs
            txt = f"{A.word_text(rule.lhs)} = {rule.rhs.to_text()}"
            d = self.coproduct(rel)
            if d:
                bad.append(f"coproduct of [{txt}] is {d.to_text()}")
            e = self.counit(rel)
            if e:
                bad.append(f"counit of [{txt}] is {e}")
            s = self.antipode(rel)
            if s:
                bad.append(f"antipode of [{txt}] is {s.to_text()}")
        return bad

    def check_axioms(self, deg: int) -> AxiomReport:
        A = self.alphabet
        rep = AxiomReport(self.name, deg)
        wd = self.well_definedness()
        r = rep.result("well_definedness")
        for _ in range(len(self.base.rules) - len(wd)):
            r.record(True)
        for msg in wd:
            r.record(False, msg)
        for w in self.base.basis_words(deg):
            wt = A.word_text(w)
            x = NCPoly({w: ONE}, A)
            dw = self.delta_word(w)
            # coassociativity
            rep.result("coassociativity").record(
                self._delta_left(dw) == self._delta_right(dw), f"(D(x)id)D != (id(x)D)D on {wt}"
            )
            # counit laws
            left = A.zero()
            right = A.zero()
            for (w1, w2), c in dw.terms.items():
                e1 = self.counit_word(w1)
                if e1:
                    left = left + NCPoly({w2: c * e1}, A)
                e2 = self.counit_word(w2)
                if e2:
                    right = right + NCPoly({w1: c * e2}, A)
            rep.result("counit").record(left == x and right == x, f"counit law fails on {wt}")
            # antipode laws
            target = A.one(self.counit_word(w)) if self.counit_word(w) else A.zero()
            ls = self._mult(dw, True)
            rs = self._mult(dw, False)
            rep.result("antipode").record(
                ls == target and rs == target,
                f"m(S(x)id)D({wt}) = {ls.to_text()}, m(id(x)S)D({wt}) = {rs.to_text()}",
            )
            # *-compatibility of the coproduct and S(S(x*)*) = x
            xs = self.base.normal_form(star(x))
            rep.result("star_coproduct").record(
                self.coproduct(xs) == self.base.nf_tensor(star_tensor(dw)), f"D(x*) != (*(x)*)D(x) on {wt}"
            )
            sss = self.base.normal_form(star(self.antipode(xs)))
            rep.result("star_antipode").record(
                self.antipode(sss) == x, f"S(S(x*)*) != x on {wt}"
            )
        log.info("%s: hopf battery at degree %d ok=%s", self.name, deg, rep.ok)
        return rep


def check_hopf_axioms(h: HopfStructure, deg: int) -> AxiomReport:
    return h.check_axioms(deg)
