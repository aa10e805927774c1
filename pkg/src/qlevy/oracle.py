"""Independent brute-force checks for the main pipeline.

None of these reuse the Gram factorization: Bochner positivity is read
off a DFT, the centered probe samples the hyperplane directly, and
cumulant synthesis goes through explicit matrix star-representations.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Mapping

import numpy as np

from .cumulant import Cumulant, DEFAULT_TOL, GeneratingState
from .monoid import StarMonoid


class OracleError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixStarRep:
    monoid: StarMonoid
    dim: int
    pi: np.ndarray  # (n, dim, dim)

    def errors(self) -> dict[str, float]:
        m, pi = self.monoid, self.pi
        n = len(m)
        mult = max(
            float(np.abs(pi[a] @ pi[c] - pi[m.table[a, c]]).max(initial=0.0))
            for a, c in iproduct(range(n), repeat=2)
        )
        adj = max(float(np.abs(pi[m.inv[b]] - pi[b].conj().T).max(initial=0.0)) for b in range(n))
        unit = float(np.abs(pi[m.u] - np.eye(self.dim)).max(initial=0.0))
        return {"multiplicativity": mult, "adjoint": adj, "unitality": unit}


def make_matrix_rep(m: StarMonoid, pi: Mapping[str, np.ndarray], tol: float = 1e-10) -> MatrixStarRep:
    arr = np.array([np.asarray(pi[b], dtype=complex) for b in m.elements])
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise OracleError("representation matrices must be square and of equal size")
    rep = MatrixStarRep(m, arr.shape[1], arr)
    bad = {k: v for k, v in rep.errors().items() if v > tol}
    if bad:
        raise OracleError(f"not a star-representation: {bad}")
    return rep


def regular_representation(m: StarMonoid) -> MatrixStarRep:
    """Left regular representation; a star-representation when m is a group with b* = b^-1."""
    n = len(m)
    pi = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        pi[a, m.table[a], np.arange(n)] = 1.0
    return MatrixStarRep(m, n, pi)


def cumulant_from_rep(rep: MatrixStarRep, eta, tol: float = 1e-10, name: str = "synth") -> Cumulant:
    """l(b) = eta^H (pi(b) - I) eta."""
    bad = {k: v for k, v in rep.errors().items() if v > tol}
    if bad:
        raise OracleError(f"not a star-representation: {bad}")
    eta = np.asarray(eta, dtype=complex)
    if eta.shape != (rep.dim,):
        raise OracleError(f"eta has shape {eta.shape}, expected ({rep.dim},)")
    vals = np.einsum("i,bij,j->b", eta.conj(), rep.pi - np.eye(rep.dim), eta)
    vals[rep.monoid.u] = 0.0
    return Cumulant(rep.monoid, vals, name)


def cyclic_order(m: StarMonoid) -> list[int]:
    """Element indices as powers g^0, g^1, ... of a generator; requires a cyclic group with b* = b^-1."""
    n = len(m)
    u = m.u
    if not m.is_group():
        raise OracleError(f"monoid {m.name!r} is not a group")
    for b in range(n):
        if m.table[b, m.inv[b]] != u:
            raise OracleError(f"involution of {m.name!r} is not group inversion")
    for g in range(n):
        seq = [u]
        while len(seq) < n:
            seq.append(int(m.table[seq[-1], g]))
        if len(set(seq)) == n and m.table[seq[-1], g] == u:
            return seq
    raise OracleError(f"monoid {m.name!r} is not cyclic")


@dataclass(frozen=True)
class BochnerReport:
    spectrum: np.ndarray
    passed: bool

    def as_dict(self) -> dict:
        return {"spectrum": [float(x) for x in self.spectrum], "pass": self.passed}


def bochner_spectrum(m: StarMonoid, values: np.ndarray) -> np.ndarray:
    order = cyclic_order(m)
    f = np.asarray(values, dtype=complex)[order]
    return np.fft.fft(f).real


def bochner_check(m: StarMonoid, phi: GeneratingState, tol: float = DEFAULT_TOL) -> BochnerReport:
    """DFT of phi along a generator; nonnegative iff the circulant [phi(a*c)] is PSD."""
    s = bochner_spectrum(m, phi.values)
    scale = max(1.0, float(np.abs(s).max(initial=0.0)))
    return BochnerReport(s, bool(s.min() >= -tol * scale))


def bochner_grid_margin(m: StarMonoid, l: Cumulant, ts=(0.01, 0.1, 1.0, 10.0)) -> float:
    """Smallest relative DFT component of exp(t l) over the grid."""
    out = np.inf
    for t in ts:
        s = bochner_spectrum(m, np.exp(t * l.values))
        out = min(out, float(s.min()) / max(1.0, float(np.abs(s).max())))
    return out


@dataclass(frozen=True)
class ProbeReport:
    min_observed: float
    passed: bool

    def as_dict(self) -> dict:
        return {"min_observed": self.min_observed, "pass": self.passed}


def centered_probe(
    m: StarMonoid, l: Cumulant, trials: int = 1000, seed: int = 0, tol: float = DEFAULT_TOL
) -> ProbeReport:
    """Sample unit-norm kappa with sum(kappa) = 0 and evaluate sum kappa_a l(a*c) conj(kappa_c)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = len(m)
    if n < 2:
        return ProbeReport(0.0, True)
    rng = np.random.default_rng(seed)
    L = l.values[m.star_table]
    kap = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
    kap[:, -1] = -kap[:, :-1].sum(axis=1)
    kap /= np.linalg.norm(kap, axis=1, keepdims=True)
    vals = np.einsum("ta,ac,tc->t", kap, L, kap.conj()).real
    mn = float(vals.min())
    scale = max(1.0, float(np.abs(l.values).max(initial=0.0)))
    return ProbeReport(mn, mn >= -tol * scale)


def random_functional(m: StarMonoid, rng: np.random.Generator, radius: float = 1.0, name: str = "rand") -> Cumulant:
    """Hermitian values uniform in a disc (real interval on self-adjoint elements), zero at the unit."""
    n = len(m)
    vals = np.zeros(n, dtype=complex)
    for b in range(n):
        if b == m.u:
            continue
        bs = int(m.inv[b])
        if bs < b:
            continue
        if bs == b:
            vals[b] = rng.uniform(-radius, radius)
        else:
            r = radius * np.sqrt(rng.uniform())
            z = r * np.exp(2j * np.pi * rng.uniform())
            vals[b] = z
            vals[bs] = np.conj(z)
    return Cumulant(m, vals, name)

