"""Finite star-monoids given by Cayley and involution tables.

Elements are opaque string ids; their order in the input fixes every
matrix index ordering downstream.  The enveloping algebra C[b] is
represented densely, one complex coefficient per element.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Mapping, Sequence

import numpy as np


class MonoidError(ValueError):
    """Raised when monoid tables violate an axiom.

    ``diagnostics`` lists every violation found (first one first); the
    message names the first.
    """

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__(self.diagnostics[0] if self.diagnostics else "invalid monoid")


@dataclass(frozen=True, eq=False)
class StarMonoid:
    name: str
    elements: tuple[str, ...]
    unit: str
    table: np.ndarray  # table[i, j] = index of elements[i] * elements[j]
    inv: np.ndarray  # inv[i] = index of elements[i] star
    index: Mapping[str, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def u(self) -> int:
        return self.index[self.unit]

    def idx(self, b: str) -> int:
        try:
            return self.index[b]
        except KeyError:
            raise KeyError(f"unknown element {b!r} in monoid {self.name!r}") from None

    def mul(self, a: str, c: str) -> str:
        return self.elements[self.table[self.idx(a), self.idx(c)]]

    def adjoint(self, b: str) -> str:
        return self.elements[self.inv[self.idx(b)]]

    @property
    def star_table(self) -> np.ndarray:
        """Index table of the Hermitian operation a*c = a . c^star."""
        return self.table[:, self.inv]

    def is_group(self) -> bool:
        u = self.u
        return all(u in row for row in self.table)

    def to_json(self) -> dict:
        els = self.elements
        return {
            "name": self.name,
            "elements": list(els),
            "unit": self.unit,
            "product": [[els[k] for k in row] for row in self.table],
            "involution": {els[i]: els[self.inv[i]] for i in range(len(els))},
        }

    def __eq__(self, other):
        if not isinstance(other, StarMonoid):
            return NotImplemented
        return (
            self.elements == other.elements
            and self.unit == other.unit
            and np.array_equal(self.table, other.table)
            and np.array_equal(self.inv, other.inv)
        )

    __hash__ = object.__hash__


def validate_monoid(raw: Mapping) -> StarMonoid:
    """Build a StarMonoid from raw JSON-like tables, checking every axiom.

    Raises MonoidError whose first diagnostic names the first violating
    entry or triple (in element order).
    """
    name = str(raw.get("name", "monoid"))
    try:
        elements = tuple(str(e) for e in raw["elements"])
        unit = str(raw["unit"])
        rows = raw["product"]
        invol = raw["involution"]
    except KeyError as exc:
        raise MonoidError([f"missing field {exc.args[0]!r}"]) from None

    if len(set(elements)) != len(elements):
        raise MonoidError(["duplicate element ids"])
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    if unit not in index:
        raise MonoidError([f"unit {unit!r} is not an element"])

    diags: list[str] = []
    if len(rows) != n:
        diags.append(f"product table has {len(rows)} rows, expected {n}")
    table = np.full((n, n), -1, dtype=np.int64)
    for i, row in enumerate(rows[:n]):
        if len(row) > n:
            diags.append(f"product row {elements[i]!r} has {len(row)} entries, expected {n}")
        for j in range(n):
            if j >= len(row) or row[j] is None:
                diags.append(f"missing product entry ({elements[i]}, {elements[j]})")
                continue
            v = str(row[j])
            if v not in index:
                diags.append(f"product entry ({elements[i]}, {elements[j]}) = {v!r} is not an element")
                continue
            table[i, j] = index[v]
    inv = np.full(n, -1, dtype=np.int64)
    for e in elements:
        if e not in invol:
            diags.append(f"missing involution entry for {e!r}")
            continue
        v = str(invol[e])
        if v not in index:
            diags.append(f"involution of {e!r} = {v!r} is not an element")
            continue
        inv[index[e]] = index[v]
    if diags:
        raise MonoidError(diags)

    u = index[unit]
    for b in range(n):
        if table[u, b] != b or table[b, u] != b:
            diags.append(f"unit violation at {elements[b]!r}")
    for a, b, c in iproduct(range(n), repeat=3):
        if table[table[a, b], c] != table[a, table[b, c]]:
            diags.append(
                f"associativity violation at ({elements[a]}, {elements[b]}, {elements[c]})"
            )
            break
    for b in range(n):
        if inv[inv[b]] != b:
            diags.append(f"involution not of order 2 at {elements[b]!r}")
    if inv[u] != u:
        diags.append("unit is not self-adjoint")
    for a, c in iproduct(range(n), repeat=2):
        if inv[table[a, c]] != table[inv[c], inv[a]]:
            diags.append(f"involution not anti-multiplicative at ({elements[a]}, {elements[c]})")
            break
    if diags:
        raise MonoidError(diags)

    m = StarMonoid(name, elements, unit, table, inv, index)
    bad = star_identity_violation(m)
    if bad:
        raise MonoidError([bad])
    return m


def star_identity_violation(m: StarMonoid) -> str | None:
    """Check the identities of the single Hermitian operation a*c = a . c^star.

    b*u = b and u*(u*b) = b; Hermitian symmetry u*(a*c) = c*a; and
    associativity in star form (a*b)*c = a*(c*(u*b)).
    """
    s = m.star_table
    u = m.u
    n = len(m)
    els = m.elements
    for b in range(n):
        if s[b, u] != b:
            return f"right-unit identity fails at {els[b]!r}"
        if s[u, s[u, b]] != b:
            return f"double-star identity fails at {els[b]!r}"
    for a, c in iproduct(range(n), repeat=2):
        if s[u, s[a, c]] != s[c, a]:
            return f"Hermitian identity fails at ({els[a]}, {els[c]})"
    for a, b, c in iproduct(range(n), repeat=3):
        if s[s[a, b], c] != s[a, s[c, s[u, b]]]:
            return f"star associativity fails at ({els[a]}, {els[b]}, {els[c]})"
    return None


def star(m: StarMonoid, a: str, c: str) -> str:
    """a*c = a . c^star."""
    return m.elements[m.table[m.idx(a), m.inv[m.idx(c)]]]


# -- enveloping algebra --------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlgebraVector:
    monoid: StarMonoid
    coef: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coef, dtype=complex)
        if c.shape != (len(self.monoid),):
            raise ValueError(f"coefficient vector has shape {c.shape}, expected ({len(self.monoid)},)")
        object.__setattr__(self, "coef", c)

    @classmethod
    def from_dict(cls, m: StarMonoid, coefs: Mapping[str, complex]) -> "AlgebraVector":
        c = np.zeros(len(m), dtype=complex)
        for b, v in coefs.items():
            c[m.idx(b)] += v
        return cls(m, c)

    def support(self) -> list[str]:
        return [self.monoid.elements[i] for i in np.flatnonzero(self.coef)]

    @property
    def minus(self) -> complex:
        """kappa_- = sum of coefficients; zero exactly on the ideal A."""
        return complex(self.coef.sum())

    @property
    def plus(self) -> complex:
        """kappa^+ = sum over b of conj(kappa_{b star})."""
        return complex(np.conj(self.coef[self.monoid.inv]).sum())

    def in_ideal(self, tol: float = 0.0) -> bool:
        return abs(self.minus) <= tol

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        _same(self, other)
        return AlgebraVector(self.monoid, self.coef + other.coef)

    def __sub__(self, other: "AlgebraVector") -> "AlgebraVector":
        _same(self, other)
        return AlgebraVector(self.monoid, self.coef - other.coef)

    def __mul__(self, z: complex) -> "AlgebraVector":
        return AlgebraVector(self.monoid, self.coef * z)

    __rmul__ = __mul__

    def allclose(self, other: "AlgebraVector", atol: float = 1e-12) -> bool:
        _same(self, other)
        return bool(np.allclose(self.coef, other.coef, rtol=0, atol=atol))

    def __repr__(self):
        terms = {b: complex(self.coef[self.monoid.idx(b)]) for b in self.support()}
        return f"AlgebraVector({terms})"


def _same(x: AlgebraVector, y: AlgebraVector) -> None:
    if x.monoid is not y.monoid and x.monoid != y.monoid:
        raise ValueError("algebra vectors live over different monoids")


def delta(m: StarMonoid, b: str) -> AlgebraVector:
    c = np.zeros(len(m), dtype=complex)
    c[m.idx(b)] = 1.0
    return AlgebraVector(m, c)


def conv(m: StarMonoid, kp: AlgebraVector, k: AlgebraVector) -> AlgebraVector:
    """Hermitian convolution (kp * k)_b = sum over a*c=b of kp_a conj(k_c)."""
    _same(kp, k)
    if kp.monoid != m:
        raise ValueError("algebra vectors do not live over this monoid")
    out = np.zeros(len(m), dtype=complex)
    outer = np.outer(kp.coef, np.conj(k.coef))
    np.add.at(out, m.star_table.ravel(), outer.ravel())
    return AlgebraVector(m, out)


def involute(m: StarMonoid, k: AlgebraVector) -> AlgebraVector:
    """kappa^star, with coefficient at b equal to conj(kappa_{b star})."""
    if k.monoid != m:
        raise ValueError("algebra vector does not live over this monoid")
    return AlgebraVector(m, np.conj(k.coef[m.inv]))


def algebra_product(m: StarMonoid, kp: AlgebraVector, k: AlgebraVector) -> AlgebraVector:
    """Associative product kp . k = kp * k^star."""
    return conv(m, kp, involute(m, k))
