"""Exact sparse linear algebra over Q(i)(k) on polynomial coordinate vectors.

Vectors are dicts ``column -> Scalar``; columns are words (or tagged words)
ordered by a key function.  Rows are kept in semi-echelon form with monic
pivots at their largest column, which is all membership and dimension need.
"""
from __future__ import annotations

from typing import Callable, Dict, Hashable, Iterable, List, Optional, Tuple

from .ncalg import NCPoly, word_key
from .scalar import ONE, Scalar

__all__ = ["Subspace", "DegreeBoundError", "intersect"]


class DegreeBoundError(ValueError):
    """A vector has support beyond the subspace's degree bound."""


def _axpy(v: dict, c, row: dict) -> None:
    """v -= c * row, in place."""
    for k, x in row.items():
        old = v.get(k)
        y = -(c * x) if old is None else old - c * x
        if y:
            v[k] = y
        else:
            v.pop(k, None)


class Subspace:
    """Span of vectors, kept in semi-echelon form.

    ``track`` records, for every stored row, its expression in terms of the
    vectors passed to :meth:`add`, so membership can return a witness.
    """

    def __init__(self, degree_bound: int, key: Callable = word_key, track: bool = False, alphabet=None):
        self.degree_bound = degree_bound
        self.key = key
        self.track = track
        self.alphabet = alphabet
        self.rows: Dict[Hashable, dict] = {}
        self.combos: Dict[Hashable, dict] = {}
        self._added = 0

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def _check(self, v: dict) -> None:
        for w in v:
            length = len(w[-1]) if isinstance(w, tuple) and w and isinstance(w[-1], tuple) else len(w)
            if length > self.degree_bound:
                raise DegreeBoundError(f"support word of degree {length} exceeds bound {self.degree_bound}")

    def _reduce(self, v: dict, combo: Optional[dict] = None) -> dict:
        key = self.key
        rows = self.rows
        # iterate over columns in decreasing order, eliminating those that have pivots
        done = set()
        while True:
            cand = [c for c in v if c not in done]
            if not cand:
                return v
            lead = max(cand, key=key)
            row = rows.get(lead)
            if row is None:
                done.add(lead)
                continue
            c = v[lead]
            _axpy(v, c, row)
            if combo is not None:
                _axpy(combo, c, self.combos[lead])

    def _top_reduce(self, v: dict) -> dict:
        key = self.key
        rows = self.rows
        while v:
            lead = max(v, key=key)
            row = rows.get(lead)
            if row is None:
                return v
            _axpy(v, v[lead], row)
        return v

    @staticmethod
    def _vec(p) -> dict:
        if isinstance(p, NCPoly):
            return dict(p.terms)
        return dict(p)

    def add(self, p) -> bool:
        """Insert a vector; return True if it enlarged the span."""
        v = self._vec(p)
        self._check(v)
        combo = {self._added: ONE} if self.track else None
        self._added += 1
        v = self._reduce(v, combo) if self.track else self._top_reduce(v)
        if not v:
            return False
        lead = max(v, key=self.key)
        inv = v[lead].inverse()
        row = {k: x * inv for k, x in v.items()}
        self.rows[lead] = row
        if self.track:
            self.combos[lead] = {k: x * inv for k, x in combo.items()}
        return True

    def extend(self, ps: Iterable) -> "Subspace":
        for p in ps:
            self.add(p)
        return self

    def member(self, p) -> bool:
        v = self._vec(p)
        self._check(v)
        return not self._top_reduce(v)

    def witness(self, p) -> Optional[Dict[int, Scalar]]:
        """Coefficients c_j with p = sum c_j * (j-th added vector), or None."""
        if not self.track:
            raise ValueError("subspace was built without witness tracking")
        v = self._vec(p)
        self._check(v)
        combo: dict = {}
        # p - sum c_j g_j == 0 ; track -c_j while reducing
        v = self._reduce(v, combo)
        if v:
            return None
        return {j: -c for j, c in combo.items()}

    def residue(self, p) -> dict:
        """Fully reduced remainder of ``p`` modulo the span."""
        v = self._vec(p)
        self._check(v)
        return self._reduce(v)

    def basis(self) -> List[dict]:
        return [dict(self.rows[k]) for k in sorted(self.rows, key=self.key, reverse=True)]

    def basis_polys(self) -> List[NCPoly]:
        if self.alphabet is None:
            raise ValueError("subspace has no alphabet")
        return [NCPoly(r, self.alphabet) for r in self.basis()]

    def pivots(self) -> List:
        return sorted(self.rows, key=self.key)

    def copy(self) -> "Subspace":
        out = Subspace(self.degree_bound, self.key, self.track, self.alphabet)
        out.rows = {k: dict(r) for k, r in self.rows.items()}
        out.combos = {k: dict(r) for k, r in self.combos.items()}
        out._added = self._added
        return out

    def contains(self, other: "Subspace") -> bool:
        return all(self.member(r) for r in other.rows.values())

    def same_as(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains(other)

    def reduced_basis(self) -> List[dict]:
        """Canonical reduced row-echelon basis (monic pivots, zero above/below pivots)."""
        out = {}
        for lead in sorted(self.rows, key=self.key):
            row = dict(self.rows[lead])
            for p, prow in out.items():
                c = row.get(p)
                if c:
                    _axpy(row, c, prow)
            for p in list(out):
                c = out[p].get(lead)
                if c:
                    _axpy(out[p], c, row)
            out[lead] = row
        return [out[k] for k in sorted(out, key=self.key, reverse=True)]


def intersect(U: Subspace, W: Subspace) -> Subspace:
    """Zassenhaus intersection of two subspaces with word columns."""
    key = U.key
    bound = max(U.degree_bound, W.degree_bound)

    def tkey(c):
        return (c[0], key(c[1]))

    Z = Subspace(bound, key=tkey)
    Z._check = lambda v: None
    for r in U.rows.values():
        v = {(1, w): x for w, x in r.items()}
        v.update({(0, w): x for w, x in r.items()})
        Z.add(v)
    for r in W.rows.values():
        Z.add({(1, w): x for w, x in r.items()})
    out = Subspace(bound, key=key, alphabet=U.alphabet or W.alphabet)
    for lead, row in Z.rows.items():
        if lead[0] == 0:
            out.add({w: x for (b, w), x in row.items() if b == 0})
    return out
