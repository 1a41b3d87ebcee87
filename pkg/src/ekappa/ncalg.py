"""Free *-algebras: alphabets, noncommutative polynomials, tensor squares, parsing.

Words are tuples of generator ids; a generator's id is its precedence rank in
the alphabet, so comparing ``(len(w), w)`` gives the degree-lexicographic order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .scalar import ONE, ZERO, I, K, Scalar, SeriesScalar, as_scalar

Word = Tuple[int, ...]
UNIT: Word = ()

__all__ = [
    "Word",
    "UNIT",
    "Generator",
    "Alphabet",
    "NCPoly",
    "TensorPoly",
    "ParseError",
    "parse",
    "parse_tensor",
    "star",
    "substitute",
    "word_key",
]


def word_key(w: Word) -> tuple:
    """Sort key for the degree-lexicographic order."""
    return (len(w), w)


@dataclass(frozen=True)
class Generator:
    id: int
    name: str
    star_partner: int


class Alphabet:
    """Ordered generator set with an involutive star pairing.

    ``names`` is given in precedence order (smallest first). ``star_pairs``
    lists unordered pairs; generators not mentioned are selfadjoint.
    """

    def __init__(
        self,
        names: Sequence[str],
        star_pairs: Iterable[Tuple[str, str]] = (),
        constants: Optional[Mapping[str, object]] = None,
    ):
        self.names = tuple(names)
        # extra named scalar atoms for the parser, e.g. {"mu": mu_series(2)}
        self.constants = dict(constants or {})
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")
        self.index = {n: j for j, n in enumerate(self.names)}
        partner = list(range(len(self.names)))
        for a, b in star_pairs:
            ia, ib = self.index[a], self.index[b]
            if partner[ia] not in (ia, ib) or partner[ib] not in (ia, ib):
                raise ValueError(f"generator paired twice: {a}, {b}")
            partner[ia], partner[ib] = ib, ia
        self.partner = tuple(partner)
        self.generators = tuple(Generator(j, n, partner[j]) for j, n in enumerate(self.names))
        self._by_length = sorted(self.names, key=len, reverse=True)

    def __len__(self) -> int:
        return len(self.names)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.names)!r})"

    def gen(self, name: str) -> "NCPoly":
        return NCPoly({(self.index[name],): ONE}, self)

    def one(self, coeff=ONE) -> "NCPoly":
        return NCPoly({UNIT: coeff}, self)

    def zero(self) -> "NCPoly":
        return NCPoly({}, self)

    def word(self, names: Iterable[str]) -> Word:
        return tuple(self.index[n] for n in names)

    def word_text(self, w: Word) -> str:
        return " ".join(self.names[j] for j in w) if w else "1"

    def match_name(self, text: str, pos: int) -> Optional[str]:
        for n in self._by_length:
            if text.startswith(n, pos):
                return n
        return None

    def parse(self, text: str) -> "NCPoly":
        return parse(text, self)


def _coeff_text(c) -> Tuple[str, str]:
    """Split a coefficient into (sign, magnitude text) for printing."""
    if isinstance(c, SeriesScalar):
        return "+", f"[{c.to_text()}]"
    t = c.to_text()
    if t.startswith("-") and not any(op in t[1:] for op in "+-"):
        return "-", t[1:]
    return "+", t


def _term_text(c, wtxt: Optional[str]) -> Tuple[str, str]:
    sign, mag = _coeff_text(c)
    if wtxt is None:
        return sign, mag
    if mag == "1":
        return sign, wtxt
    if not re.fullmatch(r"\d+", mag) and not mag.startswith("["):
        mag = f"({mag})"
    return sign, f"{mag} {wtxt}"


def _join_terms(parts: Sequence[Tuple[str, str]]) -> str:
    if not parts:
        return "0"
    sign, body = parts[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


class NCPoly:
    """Finite linear combination of words with nonzero coefficients."""

    __slots__ = ("terms", "alphabet")

    def __init__(self, terms: Mapping[Word, object], alphabet: Alphabet):
        self.terms = {w: c for w, c in terms.items() if c}
        self.alphabet = alphabet

    @classmethod
    def _raw(cls, terms: dict, alphabet: Alphabet) -> "NCPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.alphabet = alphabet
        return obj

    # structure ------------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def words(self) -> list:
        return sorted(self.terms, key=word_key, reverse=True)

    def leading_word(self) -> Word:
        return max(self.terms, key=word_key)

    def coeff(self, w: Word):
        return self.terms.get(w, ZERO)

    def constant_term(self):
        return self.terms.get(UNIT, ZERO)

    def is_scalar(self) -> bool:
        return all(not w for w in self.terms)

    def map_coeffs(self, f: Callable) -> "NCPoly":
        return NCPoly({w: f(c) for w, c in self.terms.items()}, self.alphabet)

    def __eq__(self, other) -> bool:
        if isinstance(other, NCPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction, Scalar)):
            return self.terms == ({UNIT: as_scalar(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    # arithmetic -----------------------------------------------------------
    def _lift(self, other) -> Optional["NCPoly"]:
        if isinstance(other, NCPoly):
            return other
        if isinstance(other, (int, Fraction, Scalar, SeriesScalar)):
            c = other if isinstance(other, SeriesScalar) else as_scalar(other)
            return NCPoly({UNIT: c}, self.alphabet)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for w, c in o.terms.items():
            v = out.get(w)
            if v is None:
                out[w] = c
            else:
                v = v + c
                if v:
                    out[w] = v
                else:
                    del out[w]
        return NCPoly._raw(out, self.alphabet)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw({w: -c for w, c in self.terms.items()}, self.alphabet)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "NCPoly":
        if not c:
            return NCPoly._raw({}, self.alphabet)
        out = {}
        for w, v in self.terms.items():
            p = v * c
            if p:
                out[w] = p
        return NCPoly._raw(out, self.alphabet)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            out: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    p = c1 * c2
                    v = out.get(w)
                    out[w] = p if v is None else v + p
            return NCPoly(out, self.alphabet)
        if isinstance(other, (int, Fraction, Scalar, SeriesScalar)):
            return self.scale(other if isinstance(other, SeriesScalar) else as_scalar(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar, SeriesScalar)):
            c = other if isinstance(other, SeriesScalar) else as_scalar(other)
            out = {}
            for w, v in self.terms.items():
                p = c * v
                if p:
                    out[w] = p
            return NCPoly._raw(out, self.alphabet)
        return NotImplemented

    def __truediv__(self, other):
        c = other if isinstance(other, SeriesScalar) else as_scalar(other)
        return self.scale(c.inverse())

    def __pow__(self, n: int) -> "NCPoly":
        if n < 0:
            raise ValueError("negative powers are not defined in a free algebra")
        out = self.alphabet.one()
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other: "NCPoly") -> "NCPoly":
        return self * other - other * self

    # text -----------------------------------------------------------------
    def to_text(self) -> str:
        parts = []
        for w in self.words():
            c = self.terms[w]
            parts.append(_term_text(c, self.alphabet.word_text(w) if w else None))
        return _join_terms(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"NCPoly({self.to_text()!r})"


class TensorPoly:
    """Element of the tensor square: combination of word pairs."""

    __slots__ = ("terms", "alphabet")

    def __init__(self, terms: Mapping[Tuple[Word, Word], object], alphabet: Alphabet):
        self.terms = {k: c for k, c in terms.items() if c}
        self.alphabet = alphabet

    @classmethod
    def unit(cls, alphabet: Alphabet) -> "TensorPoly":
        return cls({(UNIT, UNIT): ONE}, alphabet)

    @classmethod
    def from_pair(cls, left: NCPoly, right: NCPoly) -> "TensorPoly":
        out: dict = {}
        for w1, c1 in left.terms.items():
            for w2, c2 in right.terms.items():
                k = (w1, w2)
                p = c1 * c2
                v = out.get(k)
                out[k] = p if v is None else v + p
        return cls(out, left.alphabet)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, TensorPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k)
            out[k] = c if v is None else v + c
        return TensorPoly(out, self.alphabet)

    def __neg__(self) -> "TensorPoly":
        return TensorPoly({k: -c for k, c in self.terms.items()}, self.alphabet)

    def __sub__(self, other: "TensorPoly") -> "TensorPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TensorPoly):
            out: dict = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    k = (a1 + a2, b1 + b2)
                    p = c1 * c2
                    v = out.get(k)
                    out[k] = p if v is None else v + p
            return TensorPoly(out, self.alphabet)
        c = other if isinstance(other, SeriesScalar) else as_scalar(other)
        return TensorPoly({k: v * c for k, v in self.terms.items()}, self.alphabet)

    def __rmul__(self, other):
        c = other if isinstance(other, SeriesScalar) else as_scalar(other)
        return TensorPoly({k: c * v for k, v in self.terms.items()}, self.alphabet)

    def map_legs(self, f: Callable[[NCPoly], NCPoly], g: Callable[[NCPoly], NCPoly]) -> "TensorPoly":
        """Apply linear maps leg-wise: (f (x) g)."""
        out = TensorPoly({}, self.alphabet)
        A = self.alphabet
        for (w1, w2), c in self.terms.items():
            left = f(NCPoly({w1: ONE}, A))
            right = g(NCPoly({w2: ONE}, A))
            out = out + c * TensorPoly.from_pair(left, right)
        return out

    def to_text(self) -> str:
        keys = sorted(self.terms, key=lambda k: (word_key(k[0]), word_key(k[1])), reverse=True)
        A = self.alphabet
        parts = [_term_text(self.terms[k], f"{A.word_text(k[0])} @ {A.word_text(k[1])}") for k in keys]
        return _join_terms(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"TensorPoly({self.to_text()!r})"


# ---------------------------------------------------------------------------
# parsing


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.A = alphabet
        self.pos = 0

    def error(self, msg: str, pos: Optional[int] = None):
        raise ParseError(msg, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def eat(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def at_factor_start(self) -> bool:
        ch = self.peek()
        return bool(ch) and (ch.isalnum() or ch == "(" or ch == "_")

    def expr(self) -> NCPoly:
        out = self.A.zero()
        sign = 1
        if self.eat("-"):
            sign = -1
        else:
            self.eat("+")
        out = self.term().scale(as_scalar(sign))
        while True:
            if self.eat("+"):
                out = out + self.term()
            elif self.eat("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> NCPoly:
        out = self.factor()
        while True:
            if self.eat("*"):
                out = out * self.factor()
            elif self.eat("/"):
                start = self.pos
                d = self.factor()
                if not d.is_scalar() or not d:
                    self.error("divisor must be a nonzero scalar", start)
                out = out.scale(d.constant_term().inverse())
            elif self.at_factor_start():
                out = out * self.factor()
            else:
                return out

    def factor(self) -> NCPoly:
        base = self.atom()
        if self.eat("^"):
            self.skip()
            m = re.match(r"\d+", self.text[self.pos:])
            if not m:
                self.error("expected non-negative integer exponent")
            self.pos += m.end()
            base = base ** int(m.group())
        return base

    def atom(self) -> NCPoly:
        self.skip()
        start = self.pos
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        ch = self.text[self.pos]
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if not self.eat(")"):
                self.error("expected ')'")
            return inner
        if ch.isdigit():
            m = re.match(r"\d+", self.text[self.pos:])
            self.pos += m.end()
            return self.A.one(as_scalar(int(m.group())))
        name = self.A.match_name(self.text, self.pos)
        m = re.match(r"[A-Za-z_][A-Za-z0-9_]*", self.text[self.pos:])
        ident = m.group() if m else ""
        if name is not None and len(name) >= len(ident):
            self.pos += len(name)
            return self.A.gen(name)
        if ident in self.A.constants:
            self.pos += len(ident)
            return self.A.one(self.A.constants[ident])
        if ident == "i":
            self.pos += 1
            return self.A.one(I)
        if ident == "k":
            self.pos += 1
            return self.A.one(K)
        if ident == "I":
            self.pos += 1
            return self.A.one()
        if ident:
            self.error(f"unknown generator {ident!r}", start)
        self.error(f"unexpected character {ch!r}", start)

    def tensor(self) -> TensorPoly:
        out = TensorPoly({}, self.A)
        sign = -1 if self.eat("-") else 1
        if sign == 1:
            self.eat("+")
        while True:
            left = self.term()
            if not self.eat("@"):
                self.error("expected '@' in tensor expression")
            right = self.term()
            piece = TensorPoly.from_pair(left, right)
            out = out + (piece if sign == 1 else -piece)
            if self.eat("+"):
                sign = 1
            elif self.eat("-"):
                sign = -1
            else:
                return out

    def finish(self):
        self.skip()
        if self.pos != len(self.text):
            self.error(f"unexpected {self.text[self.pos]!r}")


def parse(text: str, alphabet: Alphabet):
    """Parse an expression; returns a TensorPoly when ``@`` occurs, else an NCPoly."""
    if "@" in text:
        return parse_tensor(text, alphabet)
    p = _Parser(text, alphabet)
    if not text.strip():
        p.error("empty expression")
    out = p.expr()
    p.finish()
    return out


def parse_tensor(text: str, alphabet: Alphabet) -> TensorPoly:
    p = _Parser(text, alphabet)
    out = p.tensor()
    p.finish()
    return out


# ---------------------------------------------------------------------------
# star and substitution


def star(p: NCPoly) -> NCPoly:
    """Antilinear anti-homomorphism induced by the alphabet's star pairing."""
    partner = p.alphabet.partner
    out = {}
    for w, c in p.terms.items():
        out[tuple(partner[j] for j in reversed(w))] = c.conj()
    return NCPoly._raw(out, p.alphabet)


def star_tensor(t: TensorPoly) -> TensorPoly:
    """(star (x) star) on the tensor square."""
    partner = t.alphabet.partner
    out = {}
    for (w1, w2), c in t.terms.items():
        key = (tuple(partner[j] for j in reversed(w1)), tuple(partner[j] for j in reversed(w2)))
        out[key] = c.conj()
    return TensorPoly(out, t.alphabet)


def substitute(
    p: NCPoly,
    images: Mapping,
    target: Optional[Alphabet] = None,
    reduce: Optional[Callable[[NCPoly], NCPoly]] = None,
) -> NCPoly:
    """Apply the algebra homomorphism fixed by ``images`` (generator id or name -> NCPoly).

    ``reduce`` is applied after every multiplication to keep intermediate
    results small; omit it to stay in the free algebra.
    """
    A = p.alphabet
    img = {}
    for key, v in images.items():
        j = A.index[key] if isinstance(key, str) else key
        img[j] = v
    if target is None:
        target = next(iter(img.values())).alphabet if img else A
    missing = {j for w in p.terms for j in w} - set(img)
    if missing:
        raise KeyError(f"no image for generators {[A.names[j] for j in sorted(missing)]}")
    cache: Dict[Word, NCPoly] = {UNIT: target.one()}

    def word_image(w: Word) -> NCPoly:
        if w in cache:
            return cache[w]
        prod = word_image(w[:-1]) * img[w[-1]]
        if reduce is not None:
            prod = reduce(prod)
        cache[w] = prod
        return prod

    out = target.zero()
    for w, c in p.terms.items():
        out = out + word_image(w).scale(c) if not isinstance(c, SeriesScalar) else out + c * word_image(w)
    return out
