"""Quotient algebras by oriented rewrite rules.

A :class:`Presentation` orients each defining relation so that its
degree-lexicographically largest word becomes the left-hand side.  Normal
forms are computed by leftmost rewriting with a per-presentation memo.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .ncalg import UNIT, Alphabet, NCPoly, TensorPoly, Word, parse, word_key
from .linalg import Subspace
from .scalar import ONE, SeriesScalar

log = logging.getLogger(__name__)

__all__ = [
    "Rule",
    "Presentation",
    "ResourceError",
    "OrientationError",
    "OverlapReport",
    "orient",
    "right_ideal_span",
    "member",
    "quotient_report",
    "QuotientReport",
    "InconsistencyError",
]


class ResourceError(RuntimeError):
    """Raised when a reduction produces words beyond the configured length bound."""


class OrientationError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: NCPoly

    def text(self) -> str:
        return f"{self.rhs.alphabet.word_text(self.lhs)} -> {self.rhs.to_text()}"


def orient(rel: NCPoly) -> Rule:
    """Turn ``rel = 0`` into a rule ``lead -> rest`` with the largest word on the left."""
    if not rel:
        raise OrientationError("cannot orient the zero relation")
    lead = rel.leading_word()
    c = rel.terms[lead]
    if isinstance(c, SeriesScalar) and not c.coeffs[0]:
        raise OrientationError(f"leading coefficient {c} is not invertible")
    rest = NCPoly({w: v for w, v in rel.terms.items() if w != lead}, rel.alphabet)
    return Rule(lead, -(rest / c))


@dataclass
class OverlapReport:
    presentation: str
    max_deg: int
    checked: int = 0
    resolved: int = 0
    unresolved: List[dict] = field(default_factory=list)
    completion_steps: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.unresolved

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation,
            "max_deg": self.max_deg,
            "overlaps_checked": self.checked,
            "resolved": self.resolved,
            "unresolved": self.unresolved,
            "completion_steps": self.completion_steps,
        }


class Presentation:
    """Generators, star pairing and oriented rewrite rules."""

    def __init__(
        self,
        alphabet: Alphabet,
        rules: Iterable[Rule],
        name: str = "",
        max_word_length: int = 16,
    ):
        self.alphabet = alphabet
        self.name = name
        self.max_word_length = max_word_length
        self.rules: List[Rule] = []
        self._lhs: Dict[Word, NCPoly] = {}
        self._lengths: List[int] = []
        self._cache: Dict[Word, NCPoly] = {}
        for r in rules:
            self.add_rule(r)

    @classmethod
    def from_relations(cls, alphabet: Alphabet, relations: Sequence, name: str = "", **kw) -> "Presentation":
        """Build from relations given as NCPoly (meaning ``p = 0``) or ``"lhs = rhs"`` strings."""
        pres = cls(alphabet, [], name=name, **kw)
        for rel in relations:
            if isinstance(rel, str):
                if "=" in rel:
                    left, right = rel.split("=", 1)
                    rel = parse(left, alphabet) - parse(right, alphabet)
                else:
                    rel = parse(rel, alphabet)
            # interreduce against the rules collected so far
            red = pres.normal_form(rel)
            if not red:
                log.info("%s: relation %s is a consequence of earlier ones", name, rel.to_text())
                continue
            pres.add_rule(orient(red))
        return pres

    def add_rule(self, rule: Rule) -> None:
        if rule.lhs in self._lhs:
            raise OrientationError(f"duplicate left-hand side {self.alphabet.word_text(rule.lhs)}")
        for w in rule.rhs.terms:
            if word_key(w) >= word_key(rule.lhs):
                raise OrientationError(f"rule {rule.text()} is not decreasing")
        self.rules.append(rule)
        self._lhs[rule.lhs] = rule.rhs
        self._lengths = sorted({len(l) for l in self._lhs})
        self._cache.clear()

    # reduction ------------------------------------------------------------
    def find_redex(self, w: Word) -> Optional[Tuple[int, Word]]:
        lhs = self._lhs
        for i in range(len(w)):
            for L in self._lengths:
                if i + L > len(w):
                    break
                sub = w[i : i + L]
                if sub in lhs:
                    return i, sub
        return None

    def is_normal(self, w: Word) -> bool:
        return self.find_redex(w) is None

    def nf_word(self, w: Word) -> NCPoly:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if len(w) > self.max_word_length:
            raise ResourceError(f"word of length {len(w)} exceeds bound {self.max_word_length}")
        red = self.find_redex(w)
        if red is None:
            out = NCPoly._raw({w: ONE}, self.alphabet)
        else:
            i, sub = red
            pre, post = w[:i], w[i + len(sub) :]
            acc: dict = {}
            for u, c in self._lhs[sub].terms.items():
                for v, d in self.nf_word(pre + u + post).terms.items():
                    p = c * d
                    old = acc.get(v)
                    acc[v] = p if old is None else old + p
            out = NCPoly(acc, self.alphabet)
        self._cache[w] = out
        return out

    def normal_form(self, p: NCPoly) -> NCPoly:
        acc: dict = {}
        for w, c in p.terms.items():
            for v, d in self.nf_word(w).terms.items():
                q = c * d
                old = acc.get(v)
                acc[v] = q if old is None else old + q
        return NCPoly(acc, self.alphabet)

    def nf_tensor(self, t: TensorPoly) -> TensorPoly:
        acc: dict = {}
        for (w1, w2), c in t.terms.items():
            n1 = self.nf_word(w1).terms
            n2 = self.nf_word(w2).terms
            for v1, d1 in n1.items():
                for v2, d2 in n2.items():
                    key = (v1, v2)
                    q = c * d1 * d2
                    old = acc.get(key)
                    acc[key] = q if old is None else old + q
        return TensorPoly(acc, self.alphabet)

    def mul(self, p: NCPoly, q: NCPoly) -> NCPoly:
        return self.normal_form(p * q)

    def parse(self, text: str):
        out = parse(text, self.alphabet)
        if isinstance(out, TensorPoly):
            return self.nf_tensor(out)
        return self.normal_form(out)

    # normal-form basis ----------------------------------------------------
    def basis_words(self, deg: int) -> List[Word]:
        """All normal words of length <= deg, in increasing deglex order."""
        n = len(self.alphabet)
        layer = [UNIT]
        out = [UNIT]
        for _ in range(deg):
            nxt = []
            for w in layer:
                for x in range(n):
                    v = w + (x,)
                    if not any(v[len(v) - L :] in self._lhs for L in self._lengths if L <= len(v)):
                        nxt.append(v)
            layer = nxt
            out.extend(nxt)
        return sorted(out, key=word_key)

    # confluence -----------------------------------------------------------
    def overlaps(self, max_deg: int):
        """Yield (word, first reduction, second reduction) for all ambiguities up to max_deg."""
        rules = list(self._lhs.items())
        for l1, r1 in rules:
            for l2, r2 in rules:
                # l1 ends with a proper prefix of l2
                for k in range(1, min(len(l1), len(l2))):
                    if l1[len(l1) - k :] == l2[:k]:
                        w = l1 + l2[k:]
                        if len(w) > max_deg:
                            continue
                        a = r1 * NCPoly({l2[k:]: ONE}, self.alphabet)
                        b = NCPoly({l1[: len(l1) - k]: ONE}, self.alphabet) * r2
                        yield w, a, b
                # l2 strictly inside l1
                if l1 != l2 and len(l2) < len(l1):
                    for i in range(len(l1) - len(l2) + 1):
                        if l1[i : i + len(l2)] == l2:
                            a = r1
                            b = NCPoly({l1[:i]: ONE}, self.alphabet) * r2 * NCPoly(
                                {l1[i + len(l2) :]: ONE}, self.alphabet
                            )
                            yield l1, a, b

    def check_confluence(self, max_deg: int, complete: bool = False, rule_degree_cap: int = 6) -> OverlapReport:
        """Resolve every overlap ambiguity; optionally add consequences as new rules."""
        report = OverlapReport(self.name, max_deg)
        while True:
            pending = []
            report.checked = 0
            report.resolved = 0
            for w, a, b in self.overlaps(max_deg):
                report.checked += 1
                diff = self.normal_form(a) - self.normal_form(b)
                if diff:
                    pending.append((w, diff))
                else:
                    report.resolved += 1
            if not pending or not complete:
                break
            added = False
            for w, diff in pending:
                diff = self.normal_form(diff)
                if not diff:
                    continue
                try:
                    rule = orient(diff)
                except OrientationError:
                    continue
                if len(rule.lhs) > rule_degree_cap or rule.lhs in self._lhs:
                    continue
                self.add_rule(rule)
                msg = f"added {rule.text()} from overlap {self.alphabet.word_text(w)}"
                log.info("%s: %s", self.name, msg)
                report.completion_steps.append(msg)
                added = True
            if not added:
                break
        for w, diff in pending:
            report.unresolved.append(
                {"word": self.alphabet.word_text(w), "difference": self.normal_form(diff).to_text()}
            )
        return report


def check_confluence(pres: Presentation, max_deg: int, complete: bool = False) -> OverlapReport:
    return pres.check_confluence(max_deg, complete=complete)


def basis_words(pres: Presentation, deg: int) -> List[Word]:
    return pres.basis_words(deg)


def normal_form(p: NCPoly, pres: Presentation) -> NCPoly:
    return pres.normal_form(p)


# right ideals -----------------------------------------------------------------


class InconsistencyError(ValueError):
    """The counit does not vanish on an ideal generator."""


def right_ideal_span(gens: Sequence[NCPoly], pres: Presentation, deg: int, track: bool = False) -> Subspace:
    """Span of nf(g w) over generators g and normal words w with deg g + deg w <= deg."""
    S = Subspace(deg, track=track, alphabet=pres.alphabet)
    A = pres.alphabet
    for g in gens:
        g = pres.normal_form(g)
        if not g:
            if track:
                S.add({})
            continue
        room = deg - g.degree()
        if room < 0:
            continue
        for w in pres.basis_words(room):
            S.add(pres.normal_form(g * NCPoly._raw({w: ONE}, A)))
    return S


def member(p: NCPoly, s: Subspace) -> bool:
    return s.member(p)


@dataclass
class QuotientReport:
    presentation: str
    degree: int
    dimension: int
    kernel_dimension: int
    ideal_dimension: int
    representatives: List[str]
    representatives_ok: bool
    witness: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "presentation": self.presentation,
            "degree": self.degree,
            "dimension": self.dimension,
            "ker_eps_dimension": self.kernel_dimension,
            "ideal_dimension": self.ideal_dimension,
            "representatives": self.representatives,
            "representatives_ok": self.representatives_ok,
            "witness": self.witness,
        }


def quotient_report(
    pres: Presentation,
    ideal_gens: Sequence[NCPoly],
    counit: Callable[[NCPoly], object],
    deg: int,
    representatives: Sequence[NCPoly] = (),
) -> QuotientReport:
    """dim (ker eps)_{<=deg} / R_{<=deg}, and whether the representatives give a basis of it."""
    A = pres.alphabet
    for g in ideal_gens:
        e = counit(pres.normal_form(g))
        if e:
            raise InconsistencyError(f"counit of ideal generator {g.to_text()} is {e}, not 0")
    R = right_ideal_span(ideal_gens, pres, deg)
    words = pres.basis_words(deg)
    kdim = len(words) - 1
    dim = kdim - R.dim
    reps = [pres.normal_form(r) for r in representatives]
    ok = True
    witness = None
    if reps:
        Q = R.copy()
        for r in reps:
            if counit(r):
                ok, witness = False, f"representative {r.to_text()} is not in ker eps"
                break
            if not Q.add(r):
                ok, witness = False, f"representative {r.to_text()} is dependent modulo the ideal"
                break
        if ok:
            for w in words:
                if not w:
                    continue
                x = NCPoly._raw({w: ONE}, A) - counit(NCPoly._raw({w: ONE}, A))
                if not Q.member(x):
                    ok, witness = False, f"{A.word_text(w)} - eps is not spanned by the representatives"
                    break
        if ok and len(reps) != dim:
            ok, witness = False, f"{len(reps)} representatives for a quotient of dimension {dim}"
    return QuotientReport(pres.name, deg, dim, kdim, R.dim, [r.to_text() for r in reps], ok, witness)
