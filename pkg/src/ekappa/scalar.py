"""Exact coefficients: the field Q(i)(k) and truncated series over it.

Every coefficient is stored as ``(re + i*im) / den`` where ``re``, ``im`` and
``den`` are polynomials in k with rational coefficients, ``den`` is monic and
``gcd(re, im, den) == 1``.  Because k is real and transcendental this form is
unique, so equality and hashing are structural.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence, Union

from flint import fmpq, fmpq_poly

__all__ = [
    "Scalar",
    "SeriesScalar",
    "ZERO",
    "ONE",
    "I",
    "K",
    "mu_series",
    "mu_inverse_series",
    "series_coeff",
    "as_scalar",
]

_PZERO = fmpq_poly([])
_PONE = fmpq_poly([1])


def _poly_key(p: fmpq_poly) -> tuple:
    return tuple((int(c.p), int(c.q)) for c in p.coeffs())


def _is_monomial(p: fmpq_poly) -> bool:
    cs = p.coeffs()
    return all(c == 0 for c in cs[:-1])


class Scalar:
    """Element of Q(i)(k) in canonical form."""

    __slots__ = ("re", "im", "den", "_hash")

    def __init__(self, re, im=None, den=None, _canonical=False):
        re = re if isinstance(re, fmpq_poly) else fmpq_poly([re])
        im = _PZERO if im is None else (im if isinstance(im, fmpq_poly) else fmpq_poly([im]))
        den = _PONE if den is None else (den if isinstance(den, fmpq_poly) else fmpq_poly([den]))
        if not _canonical:
            re, im, den = self._canon(re, im, den)
        self.re = re
        self.im = im
        self.den = den
        self._hash = None

    @staticmethod
    def _canon(re, im, den):
        if den.is_zero():
            raise ZeroDivisionError("scalar with zero denominator")
        if re.is_zero() and im.is_zero():
            return _PZERO, _PZERO, _PONE
        if den.degree() > 0:
            if _is_monomial(den):
                # strip common powers of k only
                shift = den.degree()
                for p in (re, im):
                    if not p.is_zero():
                        cs = p.coeffs()
                        low = next(j for j, c in enumerate(cs) if c != 0)
                        shift = min(shift, low)
                if shift:
                    s = fmpq_poly([0] * shift + [1])
                    re, im, den = re // s, im // s, den // s
            else:
                g = den.gcd(re).gcd(im) if not im.is_zero() else den.gcd(re)
                if re.is_zero():
                    g = den.gcd(im)
                if g.degree() > 0:
                    re, im, den = re // g, im // g, den // g
        lc = den.coeffs()[-1]
        if lc != 1:
            inv = 1 / lc
            re, im, den = re * inv, im * inv, den * inv
        return re, im, den

    # construction helpers -------------------------------------------------
    @classmethod
    def from_fraction(cls, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0) -> "Scalar":
        return cls(fmpq_poly([_q(re)]), fmpq_poly([_q(im)]), _PONE)

    @classmethod
    def kappa_power(cls, n: int) -> "Scalar":
        if n >= 0:
            return cls(fmpq_poly([0] * n + [1]), _PZERO, _PONE, _canonical=True)
        return cls(_PONE, _PZERO, fmpq_poly([0] * (-n) + [1]), _canonical=True)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        from .ncalg import Alphabet, parse

        p = parse(text, Alphabet([]))
        if not p.terms:
            return ZERO
        if set(p.terms) != {()}:
            raise ValueError(f"not a scalar: {text!r}")
        return p.terms[()]

    # predicates -----------------------------------------------------------
    def __bool__(self) -> bool:
        return not (self.re.is_zero() and self.im.is_zero())

    def is_one(self) -> bool:
        return self.im.is_zero() and self.den == _PONE and self.re == _PONE

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_constant(self) -> bool:
        return self.den.degree() <= 0 and self.re.degree() <= 0 and self.im.degree() <= 0

    def key(self) -> tuple:
        return (_poly_key(self.re), _poly_key(self.im), _poly_key(self.den))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.from_fraction(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im and self.den == other.den

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Scalar):
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.from_fraction(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o:
            return self
        if not self:
            return o
        if self.den == o.den:
            return Scalar(self.re + o.re, self.im + o.im, self.den)
        return Scalar(self.re * o.den + o.re * self.den, self.im * o.den + o.im * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im, self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self or not o:
            return ZERO
        if o.im.is_zero():
            if self.im.is_zero():
                return Scalar(self.re * o.re, _PZERO, self.den * o.den)
            return Scalar(self.re * o.re, self.im * o.re, self.den * o.den)
        if self.im.is_zero():
            return Scalar(self.re * o.re, self.re * o.im, self.den * o.den)
        return Scalar(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
            self.den * o.den,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ZeroDivisionError("division by zero scalar")
        # 1/((re + i im)/den) = den (re - i im) / (re^2 + im^2)
        norm = self.re * self.re + self.im * self.im
        return Scalar(self.den * self.re, -(self.den * self.im), norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "Scalar":
        if self.im.is_zero():
            return self
        return Scalar(self.re, -self.im, self.den, _canonical=True)

    def constant_value(self) -> complex:
        """Gaussian rational value of a constant scalar, as ``(re, im)`` Fractions."""
        if not self.is_constant():
            raise ValueError(f"{self} depends on k")
        d = _frac(self.den.coeffs()[0]) if self.den.degree() == 0 else Fraction(1)
        re = _frac(self.re.coeffs()[0]) if not self.re.is_zero() else Fraction(0)
        im = _frac(self.im.coeffs()[0]) if not self.im.is_zero() else Fraction(0)
        return (re / d, im / d)

    # text -----------------------------------------------------------------
    def to_text(self) -> str:
        if not self:
            return "0"
        # clear rational denominators so the numerator has Gaussian-integer coefficients
        allc = list(self.re.coeffs()) + list(self.im.coeffs()) + list(self.den.coeffs())
        m = reduce(lcm, (int(c.q) for c in allc), 1)
        g = 0
        from math import gcd

        for c in allc:
            g = gcd(g, int(c.p) * (m // int(c.q)))
        scale = fmpq(m, g) if g else fmpq(m)
        re, im, den = self.re * scale, self.im * scale, self.den * scale
        num = _gauss_poly_text(re, im)
        if den == _PONE:
            return num
        dtxt = _gauss_poly_text(den, _PZERO)
        if _needs_parens(num):
            num = f"({num})"
        if _needs_parens(dtxt) or "*" in dtxt:
            dtxt = f"({dtxt})"
        return f"{num}/{dtxt}"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()!r})"


def _q(x) -> fmpq:
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    return fmpq(x)


def _frac(c: fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def _needs_parens(txt: str) -> bool:
    return any(op in txt[1:] for op in "+-")


def _gauss_int_text(a: int, b: int) -> str:
    if b == 0:
        return str(a)
    if a == 0:
        if b == 1:
            return "i"
        if b == -1:
            return "-i"
        return f"{b}*i"
    bi = "i" if abs(b) == 1 else f"{abs(b)}*i"
    return f"({a}{'+' if b > 0 else '-'}{bi})"


def _gauss_poly_text(re: fmpq_poly, im: fmpq_poly) -> str:
    n = max(re.degree(), im.degree())
    rc = [int(c.p) for c in re.coeffs()]
    ic = [int(c.p) for c in im.coeffs()]
    parts = []
    for d in range(n, -1, -1):
        a = rc[d] if d < len(rc) else 0
        b = ic[d] if d < len(ic) else 0
        if a == 0 and b == 0:
            continue
        coeff = _gauss_int_text(a, b)
        if d == 0:
            mono = coeff
        else:
            kp = "k" if d == 1 else f"k^{d}"
            if coeff == "1":
                mono = kp
            elif coeff == "-1":
                mono = "-" + kp
            else:
                mono = f"{coeff}*{kp}"
        parts.append(mono)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


ZERO = Scalar(_PZERO, _PZERO, _PONE, _canonical=True)
ONE = Scalar(_PONE, _PZERO, _PONE, _canonical=True)
I = Scalar(_PZERO, _PONE, _PONE, _canonical=True)
K = Scalar(fmpq_poly([0, 1]), _PZERO, _PONE, _canonical=True)


def as_scalar(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.from_fraction(x)
    if isinstance(x, str):
        return Scalar.parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Scalar")


class SeriesScalar:
    """Truncated power series ``sum c_j t^j`` (j <= order) with Scalar coefficients."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        cs = [as_scalar(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order must be non-negative")
        cs = cs[: order + 1] + [ZERO] * (order + 1 - len(cs))
        self.coeffs = tuple(cs)
        self._hash = None

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "SeriesScalar":
        return cls([as_scalar(c)], order)

    @classmethod
    def t(cls, order: int) -> "SeriesScalar":
        return cls([ZERO, ONE], order)

    def coeff(self, k: int) -> Scalar:
        return series_coeff(self, k)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, SeriesScalar):
            return self.coeffs == other.coeffs
        if isinstance(other, (Scalar, int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def _coerce(self, other):
        if isinstance(other, SeriesScalar):
            return other
        if isinstance(other, (Scalar, int, Fraction)):
            return SeriesScalar.constant(other, self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.order, o.order)
        return SeriesScalar([self.coeffs[j] + o.coeffs[j] for j in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return SeriesScalar([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.order, o.order)
        out = [ZERO] * (n + 1)
        for a, ca in enumerate(self.coeffs[: n + 1]):
            if not ca:
                continue
            for b in range(n + 1 - a):
                cb = o.coeffs[b]
                if cb:
                    out[a + b] = out[a + b] + ca * cb
        return SeriesScalar(out, n)

    __rmul__ = __mul__

    def inverse(self) -> "SeriesScalar":
        c0 = self.coeffs[0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, self.order + 1):
            acc = ZERO
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-(acc * inv0))
        return SeriesScalar(out, self.order)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = SeriesScalar.constant(ONE, self.order)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "SeriesScalar":
        return SeriesScalar([c.conj() for c in self.coeffs], self.order)

    def truncate(self, order: int) -> "SeriesScalar":
        return SeriesScalar(self.coeffs[: order + 1], min(order, self.order))

    def to_text(self) -> str:
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            tp = "" if j == 0 else ("*t" if j == 1 else f"*t^{j}")
            parts.append(f"({c.to_text()}){tp}")
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(t^{self.order + 1})"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"SeriesScalar({self.to_text()!r})"


def series_coeff(s: SeriesScalar, k: int) -> Scalar:
    if k < 0:
        raise IndexError("negative series index")
    if k > s.order:
        raise IndexError(f"coefficient t^{k} is beyond truncation order {s.order}")
    return s.coeffs[k]


def mu_series(order: int = 2) -> SeriesScalar:
    """Taylor expansion of exp(t/k) through t^order."""
    if order < 0:
        raise ValueError("order must be non-negative")
    out = []
    term = ONE
    inv_k = Scalar.kappa_power(-1)
    for j in range(order + 1):
        out.append(term)
        term = term * inv_k / (j + 1)
    return SeriesScalar(out, order)


def mu_inverse_series(order: int = 2) -> SeriesScalar:
    """Taylor expansion of exp(-t/k) through t^order."""
    m = mu_series(order)
    return SeriesScalar([c if j % 2 == 0 else -c for j, c in enumerate(m.coeffs)], order)


def scalar_sum(items: Iterable[Scalar]) -> Scalar:
    out = ZERO
    for x in items:
        out = out + x
    return out
