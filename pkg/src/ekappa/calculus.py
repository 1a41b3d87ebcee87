"""First-order differential calculi from right ideals, and their quantum Lie algebras.

For a right ideal R in ker(eps) with quotient basis [r_1], ..., [r_n]:

    d x          = x(1) pi(x(2) - eps(x(2)))             chi_i(x) = pi(x - eps x)_i
    phi_i . b    = b(1) f_ij(b(2)) phi_j                 f_ij(b)  = pi(r_i b)_j

where pi is reduction modulo the truncated span of R followed by solving for
the representative classes.  Exterior relations and Cartan-Maurer data are
declared (scalar) inputs that the checks below test for consistency.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .hopf import HopfStructure
from .linalg import Subspace
from .ncalg import UNIT, Alphabet, NCPoly, TensorPoly, Word, star, substitute, word_key
from .rewrite import right_ideal_span
from .scalar import ONE, ZERO, Scalar

log = logging.getLogger(__name__)

__all__ = [
    "Calculus",
    "CalculusError",
    "FormElement",
    "TwoForm",
    "Functional",
    "FunctionalAlgebra",
    "convolve",
    "functional_star",
    "scalar_two_form",
]


class CalculusError(ValueError):
    pass


def _add(acc: dict, key, c) -> None:
    old = acc.get(key)
    v = c if old is None else old + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


# ---------------------------------------------------------------------------
# forms


class FormElement:
    """sum_i a_i phi_i with left coefficients a_i (normal forms)."""

    __slots__ = ("terms", "labels")

    def __init__(self, terms: Mapping[int, NCPoly], labels: Sequence[str]):
        self.terms = {i: p for i, p in terms.items() if p}
        self.labels = tuple(labels)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, FormElement) and self.terms == other.terms

    def __add__(self, other: "FormElement") -> "FormElement":
        out = dict(self.terms)
        for i, p in other.terms.items():
            out[i] = out[i] + p if i in out else p
        return FormElement(out, self.labels)

    def __neg__(self) -> "FormElement":
        return FormElement({i: -p for i, p in self.terms.items()}, self.labels)

    def __sub__(self, other: "FormElement") -> "FormElement":
        return self + (-other)

    def scale(self, c) -> "FormElement":
        return FormElement({i: c * p for i, p in self.terms.items()}, self.labels)

    def __rmul__(self, c) -> "FormElement":
        return self.scale(c)

    def coefficient(self, i: int) -> Optional[NCPoly]:
        return self.terms.get(i)

    def map_coeffs(self, f: Callable) -> "FormElement":
        return FormElement({i: p.map_coeffs(f) for i, p in self.terms.items()}, self.labels)

    def is_left_invariant(self) -> bool:
        return all(p.is_scalar() for p in self.terms.values())

    def scalar_vector(self) -> Dict[int, object]:
        if not self.is_left_invariant():
            raise CalculusError(f"{self.to_text()} has non-scalar coefficients")
        return {i: p.constant_term() for i, p in self.terms.items()}

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i in sorted(self.terms):
            p = self.terms[i]
            if p.is_scalar():
                c = p.constant_term()
                txt = c.to_text() if hasattr(c, "to_text") else str(c)
                parts.append(f"({txt}) {self.labels[i]}" if txt != "1" else self.labels[i])
            else:
                parts.append(f"({p.to_text()}) {self.labels[i]}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"FormElement({self.to_text()!r})"


class TwoForm:
    """sum a_ij phi_i ^ phi_j, kept reduced by the owning calculus."""

    __slots__ = ("terms", "labels")

    def __init__(self, terms: Mapping[Tuple[int, int], NCPoly], labels: Sequence[str]):
        self.terms = {k: p for k, p in terms.items() if p}
        self.labels = tuple(labels)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, TwoForm) and self.terms == other.terms

    def __add__(self, other: "TwoForm") -> "TwoForm":
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out[k] + p if k in out else p
        return TwoForm(out, self.labels)

    def __neg__(self) -> "TwoForm":
        return TwoForm({k: -p for k, p in self.terms.items()}, self.labels)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return self + (-other)

    def scale(self, c) -> "TwoForm":
        return TwoForm({k: c * p for k, p in self.terms.items()}, self.labels)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms):
            p = self.terms[(i, j)]
            parts.append(f"({p.to_text()}) {self.labels[i]}^{self.labels[j]}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TwoForm({self.to_text()!r})"


def scalar_two_form(p: NCPoly, labels: Sequence[str]) -> Dict[Tuple[int, int], object]:
    """Read a degree-2 polynomial in label letters as a scalar two-form."""
    out: dict = {}
    for w, c in p.terms.items():
        if len(w) != 2:
            raise CalculusError(f"term of degree {len(w)} in a two-form relation")
        out[(w[0], w[1])] = c
    return out


class _Exterior:
    """Scalar relations among phi_i ^ phi_j, in semi-echelon form."""

    def __init__(self, n: int, relations: Sequence[Mapping[Tuple[int, int], object]]):
        self.n = n
        self.space = Subspace(2, key=lambda k: k)
        self.space._check = lambda v: None
        self.relations = [dict(r) for r in relations]
        for r in self.relations:
            self.space.add(r)
        self._reduced = None

    @property
    def rank(self) -> int:
        return self.space.dim

    def rows(self):
        if self._reduced is None:
            self._reduced = {max(r, key=lambda k: k): r for r in self.space.reduced_basis()}
        return self._reduced

    def reduce(self, terms: Dict[Tuple[int, int], NCPoly]) -> Dict[Tuple[int, int], NCPoly]:
        out = {k: p for k, p in terms.items() if p}
        for piv, row in self.rows().items():
            a = out.pop(piv, None)
            if a is None:
                continue
            for k, s in row.items():
                if k == piv:
                    continue
                _add(out, k, -(s * a) if not isinstance(a, NCPoly) else a.scale(-s))
        return {k: p for k, p in out.items() if p}

    def reduce_scalar(self, terms: Mapping) -> dict:
        out = {k: c for k, c in terms.items() if c}
        for piv, row in self.rows().items():
            a = out.pop(piv, None)
            if a is None:
                continue
            for k, s in row.items():
                if k != piv:
                    _add(out, k, -(s * a))
        return out

    def three_form_space(self) -> Subspace:
        """Relations of degree 3: rel ^ phi_l and phi_l ^ rel."""
        S = Subspace(3, key=lambda k: k)
        S._check = lambda v: None
        for r in self.relations:
            for l in range(self.n):
                S.add({(i, j, l): c for (i, j), c in r.items()})
                S.add({(l, i, j): c for (i, j), c in r.items()})
        return S


# ---------------------------------------------------------------------------
# functionals


class Functional:
    """Linear functional on the algebra, memoized on normal-form words."""

    def __init__(self, name: str, word_value: Callable[[Word], object], hopf: HopfStructure):
        self.name = name
        self._fn = word_value
        self.hopf = hopf
        self._memo: Dict[Word, object] = {}

    def word(self, w: Word):
        hit = self._memo.get(w)
        if hit is None:
            hit = self._fn(w)
            self._memo[w] = hit
        return hit

    def __call__(self, p: NCPoly):
        out = ZERO
        for w, c in p.terms.items():
            v = self.word(w)
            if v:
                out = c * v + out
        return out

    def __repr__(self) -> str:
        return f"Functional({self.name})"


def convolve(f: Functional, g: Functional, hopf: Optional[HopfStructure] = None) -> Functional:
    """(f g)(x) = (f (x) g)(Delta x)."""
    h = hopf or f.hopf

    def value(w: Word):
        out = ZERO
        for (w1, w2), c in h.delta_word(w).terms.items():
            a = f.word(w1)
            if a:
                b = g.word(w2)
                if b:
                    out = out + c * a * b
        return out

    return Functional(f"({f.name} {g.name})", value, h)


def functional_star(f: Functional) -> Functional:
    """f*(x) = conj(f(S(x)*))."""
    h = f.hopf
    A = h.alphabet

    def value(w: Word):
        x = NCPoly({w: ONE}, A)
        y = h.normal_form(star(h.antipode(x)))
        v = f(y)
        return v.conj() if v else v

    return Functional(f"{f.name}*", value, h)


def counit_functional(hopf: HopfStructure) -> Functional:
    return Functional("eps", hopf.counit_word, hopf)


class FunctionalAlgebra:
    """Evaluate noncommutative polynomials in named functionals (product = convolution)."""

    def __init__(self, hopf: HopfStructure, functionals: Mapping[str, Functional]):
        self.hopf = hopf
        self.names = list(functionals)
        self.alphabet = Alphabet(self.names)
        self.funcs = [functionals[n] for n in self.names]
        self._memo: Dict[Tuple[Word, Word], object] = {}

    def parse(self, text: str) -> NCPoly:
        return self.alphabet.parse(text)

    def _value(self, u: Word, w: Word):
        if not u:
            return self.hopf.counit_word(w)
        if len(u) == 1:
            return self.funcs[u[0]].word(w)
        key = (u, w)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        f = self.funcs[u[0]]
        out = ZERO
        for (w1, w2), c in self.hopf.delta_word(w).terms.items():
            a = f.word(w1)
            if a:
                b = self._value(u[1:], w2)
                if b:
                    out = out + c * a * b
        self._memo[key] = out
        return out

    def evaluate(self, poly: NCPoly, w: Word):
        out = ZERO
        for u, c in poly.terms.items():
            v = self._value(u, w)
            if v:
                out = out + c * v
        return out

    def as_functional(self, poly: NCPoly, name: str = "") -> Functional:
        return Functional(name or poly.to_text(), lambda w: self.evaluate(poly, w), self.hopf)


# ---------------------------------------------------------------------------
# the calculus


@dataclass
class CheckOutcome:
    name: str
    passed: int = 0
    failed: int = 0
    witness: Optional[str] = None
    details: List[str] = field(default_factory=list)

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
            if len(self.details) < 20:
                self.details.append(witness)


class Calculus:
    """Left covariant first-order calculus defined by a right ideal of ker(eps).

    ``degree`` bounds the words on which pi is computed: the ideal is spanned
    up to that degree, and requests beyond it raise DegreeBoundError.
    """

    def __init__(
        self,
        hopf: HopfStructure,
        ideal_gens: Sequence[NCPoly],
        labels: Sequence[str],
        representatives: Sequence[NCPoly],
        degree: int = 6,
        name: str = "",
        functional_names: Optional[Sequence[str]] = None,
        exterior: Optional[Sequence[Mapping[Tuple[int, int], object]]] = None,
        cartan: Optional[Mapping[int, Mapping[Tuple[int, int], object]]] = None,
    ):
        if len(labels) != len(representatives):
            raise CalculusError("labels and representatives differ in number")
        self.hopf = hopf
        self.pres = hopf.base
        self.A = hopf.alphabet
        self.name = name
        self.labels = tuple(labels)
        self.n = len(labels)
        self.degree = degree
        self.ideal_gens = [self.pres.normal_form(g) for g in ideal_gens]
        self.reps = [self.pres.normal_form(r) for r in representatives]
        self.functional_names = tuple(functional_names or [f"chi_{l}" for l in labels])
        for r in self.reps:
            if hopf.counit(r):
                raise CalculusError(f"representative {r.to_text()} is not in ker eps")
        for g in self.ideal_gens:
            if hopf.counit(g):
                raise CalculusError(f"ideal generator {g.to_text()} is not in ker eps")
        self.R = right_ideal_span(self.ideal_gens, self.pres, degree)
        self.Q = Subspace(degree, track=True)
        for j, r in enumerate(self.reps):
            if not self.Q.add(self.R.residue(r)):
                raise CalculusError(f"representative {self.labels[j]} is dependent modulo the ideal")
        self._chi_memo: Dict[Word, Dict[int, object]] = {}
        self._f_memo: Dict[Tuple[int, Word], Dict[int, object]] = {}
        self.exterior = _Exterior(self.n, exterior or [])
        self.cartan = {i: dict(v) for i, v in (cartan or {}).items()}
        self._mixed = Alphabet(tuple(self.A.names) + self.labels, self._star_pairs())

    def _star_pairs(self):
        pairs = []
        for j, p in enumerate(self.A.partner):
            if j < p:
                pairs.append((self.A.names[j], self.A.names[p]))
        return pairs

    # projection onto the quotient ------------------------------------------
    def pi(self, x: NCPoly) -> Dict[int, object]:
        """Coordinates of the class of x (x in ker eps) in the representative basis."""
        res = self.R.residue(x)
        if not res:
            return {}
        wit = self.Q.witness(res)
        if wit is None:
            raise CalculusError(
                f"{self.name}: class of {x.to_text()} is outside the span of the representatives "
                f"(quotient larger than {self.n} at degree {self.degree})"
            )
        return {j: c for j, c in wit.items() if c}

    def chi_word(self, w: Word) -> Dict[int, object]:
        hit = self._chi_memo.get(w)
        if hit is None:
            if not w:
                hit = {}
            else:
                x = NCPoly._raw({w: ONE}, self.A)
                e = self.hopf.counit_word(w)
                hit = self.pi(x - e if e else x)
            self._chi_memo[w] = hit
        return hit

    def f_word(self, i: int, w: Word) -> Dict[int, object]:
        key = (i, w)
        hit = self._f_memo.get(key)
        if hit is None:
            hit = self.pi(self.pres.normal_form(self.reps[i] * NCPoly._raw({w: ONE}, self.A)))
            self._f_memo[key] = hit
        return hit

    # one-forms ------------------------------------------------------------
    def form(self, terms: Mapping[int, NCPoly]) -> FormElement:
        return FormElement({i: self.pres.normal_form(p) for i, p in terms.items()}, self.labels)

    def basis_form(self, i: int) -> FormElement:
        return FormElement({i: self.A.one()}, self.labels)

    def differential(self, x: NCPoly) -> FormElement:
        acc: Dict[int, dict] = {}
        for w, c in x.terms.items():
            for (w1, w2), d in self.hopf.delta_word(w).terms.items():
                for j, v in self.chi_word(w2).items():
                    _add(acc.setdefault(j, {}), w1, c * d * v)
        return FormElement({j: NCPoly(t, self.A) for j, t in acc.items()}, self.labels)

    def lmul(self, a: NCPoly, f: FormElement) -> FormElement:
        return FormElement({i: self.pres.normal_form(a * p) for i, p in f.terms.items()}, self.labels)

    def basis_times(self, i: int, b: NCPoly) -> FormElement:
        """phi_i . b in left form."""
        acc: Dict[int, dict] = {}
        for w, c in b.terms.items():
            for (w1, w2), d in self.hopf.delta_word(w).terms.items():
                for j, v in self.f_word(i, w2).items():
                    _add(acc.setdefault(j, {}), w1, c * d * v)
        return FormElement({j: NCPoly(t, self.A) for j, t in acc.items()}, self.labels)

    def rmul(self, f: FormElement, b: NCPoly) -> FormElement:
        out = FormElement({}, self.labels)
        for i, a in f.terms.items():
            out = out + self.lmul(a, self.basis_times(i, b))
        return out

    def invariant_form(self, i: int) -> FormElement:
        """pi_r^{-1}(I (x) r_i) = S(r_i(1)) d r_i(2), computed from the differential."""
        out = FormElement({}, self.labels)
        for (w1, w2), c in self.hopf.coproduct(self.reps[i]).terms.items():
            s = self.hopf.antipode_word(w1)
            out = out + self.lmul(s.scale(c), self.differential(NCPoly({w2: ONE}, self.A)))
        return out

    def form_star(self, f: FormElement) -> FormElement:
        """(sum a_i phi_i)* = sum phi_i* a_i*."""
        out = FormElement({}, self.labels)
        for i, a in f.terms.items():
            out = out + self.rmul(self.basis_star(i), self.pres.normal_form(star(a)))
        return out

    @lru_cache(maxsize=None)
    def basis_star(self, i: int) -> FormElement:
        # omega = sum S(x(1)) d x(2)  =>  omega* = sum d(x(2)*) S(x(1))*
        out = FormElement({}, self.labels)
        for (w1, w2), c in self.hopf.coproduct(self.reps[i]).terms.items():
            s = self.pres.normal_form(star(self.hopf.antipode_word(w1).scale(c)))
            dx = self.differential(self.pres.normal_form(star(NCPoly({w2: ONE}, self.A))))
            out = out + self.rmul(dx, s)
        return out

    # mixed-alphabet parsing -------------------------------------------------
    def parse_form(self, text: str) -> FormElement:
        """Parse 'a0 (s2 - 2 s1) + ...' where each term ends in exactly one label."""
        p = self._mixed.parse(text)
        nA = len(self.A)
        acc: Dict[int, dict] = {}
        for w, c in p.terms.items():
            if not w or w[-1] < nA or any(j >= nA for j in w[:-1]):
                raise CalculusError(f"term {self._mixed.word_text(w)} is not of the form (algebra word) label")
            _add(acc.setdefault(w[-1] - nA, {}), w[:-1], c)
        return self.form({i: NCPoly(t, self.A) for i, t in acc.items()})

    # two-forms ------------------------------------------------------------
    def two_form(self, terms: Mapping[Tuple[int, int], NCPoly]) -> TwoForm:
        red = self.exterior.reduce({k: self.pres.normal_form(p) for k, p in terms.items()})
        return TwoForm(red, self.labels)

    def wedge(self, f: FormElement, g: FormElement) -> TwoForm:
        acc: Dict[Tuple[int, int], NCPoly] = {}
        for i, a in f.terms.items():
            for j, b in g.terms.items():
                moved = self.basis_times(i, b)  # phi_i b = sum c_k phi_k
                for k, c in moved.terms.items():
                    p = self.pres.normal_form(a * c)
                    acc[(k, j)] = acc[(k, j)] + p if (k, j) in acc else p
        return self.two_form(acc)

    def d_basis(self, i: int) -> TwoForm:
        data = self.cartan.get(i, {})
        return self.two_form({k: self.A.one(c) for k, c in data.items()})

    def d_form(self, f: FormElement) -> TwoForm:
        out = TwoForm({}, self.labels)
        for i, a in f.terms.items():
            da = self.differential(a)
            acc = {(k, i): c for k, c in da.terms.items()}
            out = out + self.two_form(acc)
            if self.cartan.get(i):
                db = self.d_basis(i)
                out = out + self.two_form({k: self.pres.normal_form(a * p) for k, p in db.terms.items()})
        return TwoForm(self.exterior.reduce(out.terms), self.labels)

    def rmul_two(self, t: TwoForm, b: NCPoly) -> TwoForm:
        """(a phi_i ^ phi_j) b = a phi_i ^ (phi_j b)."""
        acc: Dict[Tuple[int, int], NCPoly] = {}
        for (i, j), a in t.terms.items():
            moved = self.basis_times(j, b)
            for l, c in moved.terms.items():
                inner = self.basis_times(i, c)
                for k, e in inner.terms.items():
                    p = self.pres.normal_form(a * e)
                    acc[(k, l)] = acc[(k, l)] + p if (k, l) in acc else p
        return self.two_form(acc)

    # functionals ------------------------------------------------------------
    def chi(self, i: int, x: NCPoly):
        out = ZERO
        for w, c in x.terms.items():
            v = self.chi_word(w).get(i)
            if v:
                out = out + c * v
        return out

    @lru_cache(maxsize=None)
    def chi_functional(self, i: int) -> Functional:
        return Functional(self.functional_names[i], lambda w: self.chi_word(w).get(i, ZERO), self.hopf)

    @lru_cache(maxsize=None)
    def f_functional(self, i: int, j: int) -> Functional:
        return Functional(f"f{i}{j}", lambda w: self.f_word(i, w).get(j, ZERO), self.hopf)

    def functional_algebra(self) -> FunctionalAlgebra:
        return FunctionalAlgebra(self.hopf, {n: self.chi_functional(i) for i, n in enumerate(self.functional_names)})

    # derived data -----------------------------------------------------------
    def comm_table(self) -> Dict[Tuple[int, int], FormElement]:
        """(label, generator) -> phi_label . generator in left form."""
        out = {}
        for i in range(self.n):
            for g in range(len(self.A)):
                out[(i, g)] = self.basis_times(i, NCPoly({(g,): ONE}, self.A))
        return out

    def words(self, deg: int) -> List[Word]:
        return self.pres.basis_words(deg)


# ---------------------------------------------------------------------------
# printed tables


def parse_comm_line(c: Calculus, lhs: str, rhs: str) -> Tuple[int, int, FormElement]:
    """``[x, p] = rhs`` (read as p x = x p - rhs) or ``p x = rhs`` -> (label, generator, p.x)."""
    from .catalog.format import split_commutator

    br = split_commutator(lhs)
    if br is not None:
        x, p = br
        if p not in c.labels or x not in c.A.index:
            raise CalculusError(f"bad commutator {lhs!r}")
        return c.labels.index(p), c.A.index[x], c.parse_form(f"{x} {p}") - c.parse_form(rhs)
    parts = lhs.split()
    if len(parts) != 2 or parts[0] not in c.labels or parts[1] not in c.A.index:
        raise CalculusError(f"bad table entry {lhs!r}")
    return c.labels.index(parts[0]), c.A.index[parts[1]], c.parse_form(rhs)


def parse_comm_table(c: Calculus, equations: Iterable[Tuple[int, str, str]]) -> Dict[Tuple[int, int], FormElement]:
    """Printed commutation table.  A duplicated entry raises CalculusError."""
    out: Dict[Tuple[int, int], FormElement] = {}
    for no, lhs, rhs in equations:
        i, g, f = parse_comm_line(c, lhs, rhs)
        if (i, g) in out:
            raise CalculusError(f"line {no}: entry {c.labels[i]}.{c.A.names[g]} given twice")
        out[(i, g)] = f
    return out


def _entry_name(c: Calculus, i: int, g: int) -> str:
    return f"{c.labels[i]} {c.A.names[g]}"


def check_comm_table(c: Calculus, printed: Mapping[Tuple[int, int], FormElement]) -> CheckOutcome:
    """Derived phi_i . g against a printed table, entry by entry, with the coefficient diff."""
    out = CheckOutcome(f"{c.name}.comm_table")
    derived = c.comm_table()
    for key in sorted(derived):
        name = _entry_name(c, *key)
        if key not in printed:
            out.record(False, f"{name}: missing from the printed table (derived {derived[key].to_text()})")
            continue
        diff = derived[key] - printed[key]
        out.record(not diff, f"{name}: derived - printed = {diff.to_text()}")
    for key in printed:
        if key not in derived:
            out.record(False, f"{_entry_name(c, *key)}: unknown entry")
    return out


def table_consistency(c: Calculus, table: Mapping[Tuple[int, int], FormElement]) -> CheckOutcome:
    """Does a (printed) right action phi_i . g respect the defining relations?

    The table is extended to words by (phi . x) . y and every rule lhs - rhs
    must act as zero.  A table failing this is not a bimodule structure at all.
    """
    out = CheckOutcome(f"{c.name}.table_consistency")

    def act(f: FormElement, w: Word) -> FormElement:
        for g in w:
            acc = FormElement({}, c.labels)
            for i, a in f.terms.items():
                acc = acc + c.lmul(a, table[(i, g)])
            f = acc
        return f

    for rule in c.pres.rules:
        rel = NCPoly({rule.lhs: ONE}, c.A) - rule.rhs
        for i in range(c.n):
            if any((i, g) not in table for g in range(len(c.A))):
                out.record(False, f"{c.labels[i]}: incomplete table")
                continue
            acc = FormElement({}, c.labels)
            for w, co in rel.terms.items():
                acc = acc + act(c.basis_form(i), w).scale(co)
            out.record(not acc, f"{c.labels[i]} . ({c.A.word_text(rule.lhs)} - ...) = {acc.to_text()}")
    return out


def check_form_star(c: Calculus, printed: Mapping[int, FormElement], deg: int = 2) -> CheckOutcome:
    """phi_i* against the printed star table, plus star o star = id on a phi_i for words a of degree <= deg."""
    out = CheckOutcome(f"{c.name}.form_star")
    for i in range(c.n):
        got = c.basis_star(i)
        if i in printed:
            diff = got - printed[i]
            out.record(not diff, f"{c.labels[i]}*: derived - printed = {diff.to_text()}")
        for w in c.words(deg):
            f = FormElement({i: NCPoly({w: ONE}, c.A)}, c.labels)
            back = c.form_star(c.form_star(f))
            out.record(back == f, f"(({c.A.word_text(w)} {c.labels[i]})*)* = {back.to_text()}")
    return out


# ---------------------------------------------------------------------------
# consistency of d and the exterior algebra


def _word_poly(c: Calculus, w: Word) -> NCPoly:
    return NCPoly({w: ONE}, c.A)


def check_leibniz(c: Calculus, deg: int = 4) -> CheckOutcome:
    """d(xy) = dx . y + x . dy for normal-form words with deg x + deg y <= deg."""
    out = CheckOutcome(f"{c.name}.leibniz")
    words = c.words(deg)
    for u in words:
        if not u:
            continue
        du = c.differential(_word_poly(c, u))
        for v in words:
            if not v or len(u) + len(v) > deg:
                continue
            x, y = _word_poly(c, u), _word_poly(c, v)
            lhs = c.differential(c.pres.normal_form(x * y))
            rhs = c.rmul(du, y) + c.lmul(x, c.differential(y))
            diff = lhs - rhs
            out.record(not diff, f"d({c.A.word_text(u)} {c.A.word_text(v)}) - Leibniz = {diff.to_text()}")
    return out


def d_two_scalar(c: Calculus, t2: Mapping[Tuple[int, int], object]) -> Dict[Tuple[int, int, int], object]:
    """d of a scalar two-form: d(phi_j ^ phi_k) = dphi_j ^ phi_k - phi_j ^ dphi_k."""
    acc: dict = {}
    for (j, k), a in t2.items():
        for (p, q), b in c.cartan.get(j, {}).items():
            _add(acc, (p, q, k), a * b)
        for (p, q), b in c.cartan.get(k, {}).items():
            _add(acc, (j, p, q), -(a * b))
    return acc


def check_d_squared(c: Calculus) -> CheckOutcome:
    """d(d x) = 0 on generators (two-form level) and d(d phi_i) = 0 modulo three-form relations."""
    out = CheckOutcome(f"{c.name}.d_squared")
    for g in range(len(c.A)):
        x = _word_poly(c, (g,))
        dd = c.d_form(c.differential(x))
        out.record(not dd, f"d(d {c.A.names[g]}) = {dd.to_text()}")
    three = c.exterior.three_form_space()
    for i in range(c.n):
        d3 = d_two_scalar(c, c.cartan.get(i, {}))
        ok = three.member(d3)
        out.record(ok, f"d(d {c.labels[i]}) = {_three_text(c, three.residue(d3))} modulo the three-form relations")
    return out


def _three_text(c: Calculus, v: Mapping) -> str:
    parts = [f"({x}) {'^'.join(c.labels[j] for j in k)}" for k, x in sorted(v.items())]
    return " + ".join(parts) or "0"


def derived_cartan(c: Calculus, i: int) -> TwoForm:
    """d phi_i = sum d S(r_i(1)) ^ d r_i(2) for phi_i = sum S(r_i(1)) d r_i(2)."""
    out = TwoForm({}, c.labels)
    for (w1, w2), co in c.hopf.coproduct(c.reps[i]).terms.items():
        s = c.hopf.antipode_word(w1).scale(co)
        out = out + c.wedge(c.differential(s), c.differential(_word_poly(c, w2)))
    return TwoForm(c.exterior.reduce(out.terms), c.labels)


def check_cartan(c: Calculus) -> CheckOutcome:
    """The declared Cartan-Maurer values against the derived ones, and phi_i = S(r(1)) d r(2)."""
    out = CheckOutcome(f"{c.name}.cartan_maurer")
    for i in range(c.n):
        inv = c.invariant_form(i)
        out.record(inv == c.basis_form(i), f"S(r(1)) d r(2) for {c.labels[i]} is {inv.to_text()}")
        diff = derived_cartan(c, i) - c.d_basis(i)
        out.record(not diff, f"d{c.labels[i]}: derived - declared = {diff.to_text()}")
    return out


def check_right_stability(c: Calculus) -> CheckOutcome:
    """Each exterior relation times a generator lies in the relation module."""
    out = CheckOutcome(f"{c.name}.exterior_right_stability")
    for n, rel in enumerate(c.exterior.relations):
        t = TwoForm({k: c.A.one(x) for k, x in rel.items()}, c.labels)
        for g in range(len(c.A)):
            r = c.rmul_two(t, _word_poly(c, (g,)))
            out.record(not r, f"(relation {n + 1}) . {c.A.names[g]} = {r.to_text()}")
    return out


def check_exterior(c: Calculus) -> CheckOutcome:
    """Rank of the declared relations: n(n+1)/2 independent ones are expected."""
    out = CheckOutcome(f"{c.name}.exterior_rank")
    want = len(c.exterior.relations)
    out.record(c.exterior.rank == want, f"{want} relations but rank {c.exterior.rank}")
    return out


def consistency_suite(c: Calculus, deg: int = 4) -> Dict[str, CheckOutcome]:
    """Leibniz, d^2, Cartan-Maurer, right stability and exterior rank."""
    out = {}
    for fn in (check_exterior, check_right_stability, check_cartan, check_d_squared):
        r = fn(c)
        out[r.name] = r
    r = check_leibniz(c, deg)
    out[r.name] = r
    return out


# ---------------------------------------------------------------------------
# quantum Lie algebra checks


@dataclass
class Correction:
    """Machine-derived right-hand side for a printed functional identity."""

    identity: str
    printed: str
    derived: Optional[str]
    unique: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"identity": self.identity, "printed": self.printed, "derived": self.derived,
                "unique": self.unique, "note": self.note}


def _bracket_lhs(FA: FunctionalAlgebra, lhs: str) -> NCPoly:
    from .catalog.format import split_commutator

    br = split_commutator(lhs)
    if br is None:
        return FA.parse(lhs)
    a, b = FA.parse(br[0]), FA.parse(br[1])
    return a * b - b * a


def _monomials(FA: FunctionalAlgebra, maxdeg: int) -> List[Word]:
    n = len(FA.names)
    out: List[Word] = []
    layer: List[Word] = [()]
    for _ in range(maxdeg):
        layer = [w + (j,) for w in layer for j in range(n)]
        out.extend(layer)
    return out


def fit_functional(
    FA: FunctionalAlgebra, target: Callable[[Word], object], words: Sequence[Word], maxdeg: int = 2,
    exclude: Iterable[Word] = (),
):
    """Write a functional as a combination of monomials of degree 1..maxdeg.

    Returns (coefficients by monomial, unique?) or (None, False) when the
    target is outside their span on ``words``.
    """
    skip = set(exclude)
    mons = [m for m in _monomials(FA, maxdeg) if m not in skip]
    cols = {w: j for j, w in enumerate(words)}
    S = Subspace(0, key=lambda k: k, track=True)
    S._check = lambda v: None
    independent = True
    for m in mons:
        vec = {cols[w]: FA._value(m, w) for w in words}
        independent &= S.add({k: v for k, v in vec.items() if v})
    tvec = {cols[w]: target(w) for w in words}
    wit = S.witness({k: v for k, v in tvec.items() if v})
    if wit is None:
        return None, False
    return {mons[j]: c for j, c in wit.items() if c}, independent


def check_functional_identities(
    FA: FunctionalAlgebra, equations: Iterable[Tuple[int, str, str]], words: Sequence[Word], name: str,
    correct: bool = True,
) -> Tuple[CheckOutcome, List[Correction]]:
    """Each printed identity lhs = rhs (polynomials in the functionals) on every word."""
    out = CheckOutcome(name)
    fixes: List[Correction] = []
    for no, lhs, rhs in equations:
        diff = _bracket_lhs(FA, lhs) - FA.parse(rhs)
        bad = [w for w in words if FA.evaluate(diff, w)]
        text = f"{lhs} = {rhs}"
        if not bad:
            out.record(True)
            continue
        w = bad[0]
        out.record(False, f"{text}: lhs - rhs = {FA.evaluate(diff, w)} on {FA.hopf.alphabet.word_text(w) or '1'}"
                          f" ({len(bad)} of {len(words)} words)")
        if correct:
            L = _bracket_lhs(FA, lhs)
            R = FA.parse(rhs)
            allm = _monomials(FA, 2)

            def target(u, L=L):
                return FA.evaluate(L, u)

            # first on the printed monomials, then on every monomial not in the lhs
            coeffs, unique = fit_functional(FA, target, words, exclude=[m for m in allm if m not in R.terms])
            if coeffs is None:
                coeffs, unique = fit_functional(FA, target, words, exclude=L.terms)
            derived = None
            if coeffs is not None:
                derived = NCPoly(coeffs, FA.alphabet).to_text()
            fixes.append(Correction(lhs, rhs, derived, unique,
                                    "" if coeffs is not None else "not a combination of degree <= 2 monomials"))
    return out, fixes


def check_brackets(c: Calculus, equations: Iterable[Tuple[int, str, str]], deg: int = 4):
    FA = c.functional_algebra()
    return check_functional_identities(FA, equations, c.words(deg), f"{c.name}.brackets")


def check_funcstar(c: Calculus, equations: Iterable[Tuple[int, str, str]], deg: int = 4) -> CheckOutcome:
    """chi_i* = printed combination on words of degree <= deg."""
    FA = c.functional_algebra()
    out = CheckOutcome(f"{c.name}.functional_star")
    for no, lhs, rhs in equations:
        if lhs not in FA.names:
            raise CalculusError(f"line {no}: unknown functional {lhs!r}")
        fs = functional_star(FA.funcs[FA.names.index(lhs)])
        r = FA.parse(rhs)
        for w in c.words(deg):
            diff = fs.word(w) - FA.evaluate(r, w)
            out.record(not diff, f"{lhs}*({c.A.word_text(w) or '1'}) - ({rhs}) = {diff}")
    return out


def structure_functionals(c: Calculus) -> List[List[Functional]]:
    """f_ij with phi_i x = sum_j (f_ij * x) phi_j."""
    return [[c.f_functional(i, j) for j in range(c.n)] for i in range(c.n)]


def check_structure(c: Calculus, deg: int = 3) -> Dict[str, CheckOutcome]:
    """f_ij(1) = delta_ij, multiplicativity f_ij(xy) = sum_k f_ik(x) f_kj(y), and the coproduct law

        chi_i(xy) = sum_j chi_j(x) f_ji(y) + eps(x) chi_i(y)

    on word pairs with deg x + deg y <= deg.  The transposed index order
    (chi_j(x) f_ij(y)) is evaluated as well and reported separately.
    """
    f = structure_functionals(c)
    n = c.n
    unit = CheckOutcome(f"{c.name}.structure_unit")
    mult = CheckOutcome(f"{c.name}.structure_multiplicative")
    cop = CheckOutcome(f"{c.name}.chi_coproduct")
    cop_t = CheckOutcome(f"{c.name}.chi_coproduct_transposed")
    for i in range(n):
        for j in range(n):
            v = f[i][j].word(UNIT)
            unit.record(v == (ONE if i == j else ZERO), f"f{i}{j}(1) = {v}")
    words = [w for w in c.words(deg) if w]
    for u in words:
        for v in words:
            if len(u) + len(v) > deg:
                continue
            xy = c.pres.normal_form(_word_poly(c, u) * _word_poly(c, v))
            tag = f"x={c.A.word_text(u)}, y={c.A.word_text(v)}"
            for i in range(n):
                for j in range(n):
                    lhs = f[i][j](xy)
                    rhs = ZERO
                    for k in range(n):
                        rhs = rhs + f[i][k].word(u) * f[k][j].word(v)
                    mult.record(lhs == rhs, f"f{i}{j}(xy) != sum f{i}k(x) fk{j}(y) at {tag}")
                lhs = c.chi(i, xy)
                e = c.hopf.counit_word(u)
                base = e * c.chi_word(v).get(i, ZERO)
                a = base
                b = base
                for j in range(n):
                    a = a + c.chi_word(u).get(j, ZERO) * f[j][i].word(v)
                    b = b + c.chi_word(u).get(j, ZERO) * f[i][j].word(v)
                cop.record(lhs == a, f"chi{i}(xy) - sum chi_j(x) f_j{i}(y) - eps(x) chi{i}(y) = {lhs - a} at {tag}")
                cop_t.record(lhs == b, f"chi{i}(xy) - sum chi_j(x) f_{i}j(y) - eps(x) chi{i}(y) = {lhs - b} at {tag}")
    return {r.name: r for r in (unit, mult, cop, cop_t)}


# ---------------------------------------------------------------------------
# the dual side: functionals written inside e_kappa(2)


@dataclass
class DualReport:
    outcomes: Dict[str, CheckOutcome] = field(default_factory=dict)
    corrections: List[Correction] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes.values())

    def add(self, o: CheckOutcome) -> CheckOutcome:
        self.outcomes[o.name] = o
        return o


def verify_dual_side(
    U: HopfStructure,
    elements: Mapping[str, NCPoly],
    n: int,
    brackets: Iterable[Tuple[int, str, str]] = (),
    funcstar: Iterable[Tuple[int, str, str]] = (),
    chi_names: Optional[Sequence[str]] = None,
    relation_checks: Iterable[Tuple[str, NCPoly, NCPoly]] = (),
) -> DualReport:
    """Identities of the calculus functionals, evaluated inside a presentation U.

    ``elements`` maps chi names and ``f{i}{j}`` to elements of U.  Checked in U:
    the bracket table, Delta f_ij = sum_k f_ik (x) f_kj, eps(f_ij) = delta_ij,
    the coproduct law for chi_i (both index orders, reported separately), the
    star table through the *-structure of U, and extra ``relation_checks``
    (label, lhs, rhs) compared after normal form.
    """
    rep = DualReport()
    names = list(chi_names or [k for k in elements if not k.startswith("f")])
    chi = [U.normal_form(elements[k]) for k in names]
    f = [[U.normal_form(elements[f"f{i}{j}"]) for j in range(n)] for i in range(n)]
    Lab = Alphabet(names)

    def sub(text: str) -> NCPoly:
        return substitute(Lab.parse(text), {k: chi[j] for j, k in enumerate(names)}, U.alphabet, U.normal_form)

    br = rep.add(CheckOutcome("dual.brackets"))
    for no, lhs, rhs in brackets:
        from .catalog.format import split_commutator

        pair = split_commutator(lhs)
        L = sub(pair[0]) * sub(pair[1]) - sub(pair[1]) * sub(pair[0]) if pair else sub(lhs)
        diff = U.normal_form(L - sub(rhs))
        br.record(not diff, f"{lhs} - ({rhs}) = {diff.to_text()} in U")
        if diff:
            rep.corrections.append(Correction(lhs, rhs, None, False, f"difference in U: {diff.to_text()}"))

    cop = rep.add(CheckOutcome("dual.f_coproduct"))
    cou = rep.add(CheckOutcome("dual.f_counit"))
    one = TensorPoly.unit(U.alphabet)
    for i in range(n):
        for j in range(n):
            want = TensorPoly({}, U.alphabet)
            for k in range(n):
                want = want + TensorPoly.from_pair(f[i][k], f[k][j])
            got = U.coproduct(f[i][j])
            diff = U.base.nf_tensor(got - want)
            cop.record(not diff, f"Delta f{i}{j} - sum f{i}k (x) fk{j} = {diff.to_text()}")
            e = U.counit(f[i][j])
            cou.record(e == (ONE if i == j else ZERO), f"eps(f{i}{j}) = {e}")

    law = rep.add(CheckOutcome("dual.chi_coproduct"))
    law_t = rep.add(CheckOutcome("dual.chi_coproduct_printed_order"))
    unit = U.alphabet.one()
    for i in range(n):
        got = U.coproduct(chi[i])
        a = TensorPoly.from_pair(unit, chi[i])
        b = TensorPoly.from_pair(unit, chi[i])
        for j in range(n):
            a = a + TensorPoly.from_pair(chi[j], f[j][i])
            b = b + TensorPoly.from_pair(chi[j], f[i][j])
        da = U.base.nf_tensor(got - a)
        db = U.base.nf_tensor(got - b)
        law.record(not da, f"Delta {names[i]} - sum {names[i]}.. = {da.to_text()}")
        law_t.record(not db, f"Delta {names[i]} - sum chi_j (x) f_{i}j - I (x) {names[i]} = {db.to_text()}")

    st = rep.add(CheckOutcome("dual.star"))
    for no, lhs, rhs in funcstar:
        got = U.normal_form(star(chi[names.index(lhs)]))
        diff = U.normal_form(got - sub(rhs))
        st.record(not diff, f"{lhs}* - ({rhs}) = {diff.to_text()} in U")

    rel = rep.add(CheckOutcome("dual.relations"))
    for label, lhs, rhs in relation_checks:
        diff = U.normal_form(lhs - rhs)
        rel.record(not diff, f"{label}: lhs - rhs = {diff.to_text()}")
    return rep


def dual_side_from_catalog(cat=None, name: str = "threeD") -> DualReport:
    from .catalog import default_catalog

    cat = cat or default_catalog()
    sec = cat.section(f"identity.dual.{name}")
    U = cat.hopf(sec.meta["algebra"])
    elements = {lhs: U.parse(rhs) for no, lhs, rhs in sec.equations()}
    n = len(cat.section(f"calculus.{name}").meta["labels"].split())
    names = cat.section(f"calculus.{name}").meta["functionals"].split()
    k_half = Scalar.parse("-(i*k/2)")
    jp = U.parse("J P2 - P2 J")
    checks = [("[J, P2] = -(i k/2)(E^2 - E^-2)", jp, U.parse("E^2 - Einv^2").scale(k_half))]
    return verify_dual_side(
        U, elements, n,
        brackets=cat.section(f"table.bracket.{name}").equations(),
        funcstar=cat.section(f"table.funcstar.{name}").equations() if cat.has(f"table.funcstar.{name}") else (),
        chi_names=names,
        relation_checks=checks,
    )
