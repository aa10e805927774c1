"""Cumulant densities l on a star-monoid and their exponential states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .monoid import StarMonoid

DEFAULT_TOL = 1e-9


class CumulantError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Cumulant:
    monoid: StarMonoid
    values: np.ndarray  # l(b), indexed by element order
    name: str = "l"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (len(self.monoid),):
            raise CumulantError(
                f"functional {self.name!r} has {v.size} values, monoid {self.monoid.name!r} has {len(self.monoid)} elements"
            )
        object.__setattr__(self, "values", v)

    @classmethod
    def from_dict(cls, m: StarMonoid, values: Mapping[str, complex], name: str = "l") -> "Cumulant":
        missing = [b for b in m.elements if b not in values]
        if missing:
            raise CumulantError(f"functional {name!r} is not total: no value for {missing[0]!r}")
        for b in values:
            m.idx(b)
        return cls(m, np.array([complex(values[b]) for b in m.elements]), name)

    def __call__(self, b: str) -> complex:
        return complex(self.values[self.monoid.idx(b)])

    def __add__(self, other: "Cumulant") -> "Cumulant":
        return Cumulant(self.monoid, self.values + other.values, f"{self.name}+{other.name}")

    def scaled(self, t: float) -> "Cumulant":
        return Cumulant(self.monoid, t * self.values, f"{t}*{self.name}")

    def as_dict(self) -> dict[str, complex]:
        return {b: complex(v) for b, v in zip(self.monoid.elements, self.values)}


@dataclass(frozen=True, eq=False)
class GeneratingState:
    monoid: StarMonoid
    values: np.ndarray  # phi(b)
    mu: float
    # min Gram eigenvalue of the cumulant when it was carried forward invalid
    forced_min_eigenvalue: Optional[float] = None

    def __call__(self, b: str) -> complex:
        return complex(self.values[self.monoid.idx(b)])

    def __mul__(self, other: "GeneratingState") -> "GeneratingState":
        return GeneratingState(self.monoid, self.values * other.values, self.mu + other.mu)


@dataclass(frozen=True)
class CumulantReport:
    hermitian: bool
    unit_zero: bool
    min_gram_eigenvalue: float
    valid: bool
    hermitian_error: float = 0.0
    tol: float = DEFAULT_TOL

    def as_dict(self) -> dict:
        return {
            "hermitian": self.hermitian,
            "unit_zero": self.unit_zero,
            "min_gram_eigenvalue": self.min_gram_eigenvalue,
            "valid": self.valid,
        }


def gram_kernel(m: StarMonoid, values: np.ndarray) -> np.ndarray:
    """Centered kernel l(a.c*) - l(a) - l(c*) over all elements (row/col u vanish)."""
    l = np.asarray(values, dtype=complex)
    return l[m.star_table] - l[:, None] - l[m.inv][None, :]


def reduced_gram(m: StarMonoid, l: Cumulant) -> np.ndarray:
    """Centered Gram matrix indexed by the elements other than the unit.

    Positive semidefinite exactly when l is conditionally positive, since
    {delta_b - delta_u : b != u} spans the hyperplane sum(kappa) = 0.
    """
    if l.monoid != m:
        raise CumulantError("functional is defined over a different monoid")
    G = gram_kernel(m, l.values)
    keep = [i for i in range(len(m)) if i != m.u]
    return G[np.ix_(keep, keep)]


def _min_eig(H: np.ndarray) -> tuple[float, float]:
    if H.size == 0:
        return 0.0, 0.0
    w = np.linalg.eigvalsh((H + H.conj().T) / 2)
    return float(w[0]), float(np.abs(w).max())


def validate_cumulant(m: StarMonoid, l: Cumulant, tol: float = DEFAULT_TOL) -> CumulantReport:
    vals = l.values
    unit_zero = bool(vals[m.u] == 0)
    lscale = max(1.0, float(np.abs(vals).max(initial=0.0)))
    herm_err = float(np.abs(vals[m.inv] - np.conj(vals)).max(initial=0.0))
    hermitian = herm_err <= tol * lscale
    mn, scale = _min_eig(reduced_gram(m, l))
    psd = mn >= -tol * max(1.0, scale)
    return CumulantReport(hermitian, unit_zero, mn, unit_zero and hermitian and psd, herm_err, tol)


def generating_state(
    m: StarMonoid, l: Cumulant, mu: float, *, force: bool = False, tol: float = DEFAULT_TOL
) -> GeneratingState:
    """phi(b) = exp(mu * l(b)); mu plays the role of the cell measure."""
    if mu < 0:
        raise CumulantError(f"weight must be nonnegative, got {mu}")
    rep = validate_cumulant(m, l, tol)
    if not rep.valid and not force:
        raise CumulantError(f"invalid cumulant {l.name!r}: {rep.as_dict()}")
    return GeneratingState(m, np.exp(mu * l.values), float(mu), None if rep.valid else rep.min_gram_eigenvalue)


@dataclass(frozen=True)
class PositivityReport:
    min_eigenvalue: float
    passed: bool

    def as_dict(self) -> dict:
        return {"min_eigenvalue": self.min_eigenvalue, "pass": self.passed}


def state_matrix(m: StarMonoid, values: np.ndarray) -> np.ndarray:
    """M[a, c] = phi(a . c*) over all elements, including the unit."""
    return np.asarray(values, dtype=complex)[m.star_table]


def check_positive_definite(m: StarMonoid, phi: GeneratingState, tol: float = DEFAULT_TOL) -> PositivityReport:
    M = state_matrix(m, phi.values)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    herm = float(np.abs(M - M.conj().T).max(initial=0.0))
    if herm > tol * scale:
        raise CumulantError(f"state matrix is not Hermitian (error {herm:.3g}); phi is inconsistent")
    mn, escale = _min_eig(M)
    return PositivityReport(mn, mn >= -tol * max(1.0, escale))
