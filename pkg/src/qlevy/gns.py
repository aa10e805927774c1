"""Canonical quadruples (lambda, k, k*, j) and triangular Minkowski representations.

The centered kernel is factored as G = W^H W by a truncated Hermitian
eigendecomposition; k(b) is the column of W at b^star so that

    kstar(a) k(c) = lambda(a.c) - lambda(a) - lambda(c),   kstar(a) := k(a^star)^H.

j(b) is the least-squares solution of j(b) k(c) = k(b.c) - k(b) over the
spanning family {k(c)}; its residual certifies that the quotient by the
null space is well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .cumulant import Cumulant, CumulantError, DEFAULT_TOL, gram_kernel, validate_cumulant
from .monoid import StarMonoid


class RepresentationError(ValueError):
    def __init__(self, msg: str, residual: float = float("nan")):
        super().__init__(msg)
        self.residual = residual


@dataclass(frozen=True, eq=False)
class CanonicalQuadruple:
    monoid: StarMonoid
    mu: float
    dimK: int
    k: np.ndarray  # (n, dimK); k[i] is the vector k(elements[i])
    j: np.ndarray  # (n, dimK, dimK)
    lam: np.ndarray  # (n,)
    gram_eigenvalues: np.ndarray
    residuals: dict = field(default_factory=dict)
    rank_tol: float = DEFAULT_TOL

    @property
    def kstar(self) -> np.ndarray:
        """Row functionals kstar(b) = k(b^star)^H, shape (n, dimK)."""
        return np.conj(self.k[self.monoid.inv])

    def k_of(self, b: str) -> np.ndarray:
        return self.k[self.monoid.idx(b)]

    def kstar_of(self, b: str) -> np.ndarray:
        return np.conj(self.k[self.monoid.inv[self.monoid.idx(b)]])

    def j_of(self, b: str) -> np.ndarray:
        return self.j[self.monoid.idx(b)]

    def lambda_of(self, b: str) -> complex:
        return complex(self.lam[self.monoid.idx(b)])

    def gram_products(self) -> np.ndarray:
        """Matrix of kstar(a) k(c) over all element pairs."""
        return self.kstar @ self.k.T

    def scale(self) -> float:
        return max(1.0, float(np.abs(self.lam).max(initial=0.0)), float(np.abs(self.gram_eigenvalues).max(initial=0.0)))


def factor_gram(G: np.ndarray, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Return (W, eigenvalues) with G ~ W^H W, dropping eigenvalues <= rank_tol * max(maxeig, 1).

    Eigenpairs are ordered by descending eigenvalue (stable in the solver's order).
    """
    n = G.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros(0)
    H = (G + G.conj().T) / 2
    w, V = np.linalg.eigh(H)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    cutoff = rank_tol * max(float(w[0]), 1.0)
    keep = w > cutoff
    W = np.sqrt(w[keep])[:, None] * V[:, keep].conj().T
    return W, w


def solve_cocycle(m: StarMonoid, k: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares j(b) with j(b) k(c) = k(b.c) - k(b) for all c; returns (j, max residual)."""
    n, d = k.shape
    if d == 0:
        return np.zeros((n, 0, 0), dtype=complex), 0.0
    K = k.T  # columns k(c)
    pinv = np.linalg.pinv(K)
    j = np.empty((n, d, d), dtype=complex)
    resid = 0.0
    for b in range(n):
        target = k[m.table[b]].T - k[b][:, None]
        jb = target @ pinv
        j[b] = jb
        resid = max(resid, float(np.abs(jb @ K - target).max()))
    return j, resid


def build_canonical_quadruple(
    m: StarMonoid,
    l: Cumulant,
    mu: float = 1.0,
    rank_tol: float = DEFAULT_TOL,
    *,
    tol: float = DEFAULT_TOL,
    force: bool = False,
) -> CanonicalQuadruple:
    if mu < 0:
        raise CumulantError(f"weight must be nonnegative, got {mu}")
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    report = validate_cumulant(m, l, tol)
    if not report.valid and not force:
        raise CumulantError(f"invalid cumulant {l.name!r}: {report.as_dict()}")
    lam = mu * l.values
    G = gram_kernel(m, lam)
    W, eig = factor_gram(G, rank_tol)
    k = W[:, m.inv].T.copy()  # k(b) = W[:, b*]
    j, jres = solve_cocycle(m, k)
    gram_err = float(np.abs(np.conj(k[m.inv]) @ k.T - G[:, m.inv]).max(initial=0.0))
    residuals = {"cocycle_lstsq": jres, "gram_factorization": gram_err}
    if not report.valid:
        residuals["forced_min_gram_eigenvalue"] = report.min_gram_eigenvalue
    q = CanonicalQuadruple(m, float(mu), k.shape[1], k, j, lam, eig, residuals, rank_tol)
    if not force and jres > max(tol, 1e-9) * q.scale():
        raise RepresentationError(
            f"cocycle least-squares residual {jres:.3g} exceeds tolerance; kernel is numerically inconsistent",
            jres,
        )
    return q


# -- Minkowski (pseudo-Hilbert) triangular representation ----------------


def minkowski_metric(dimK: int) -> np.ndarray:
    d = dimK + 2
    g = np.zeros((d, d))
    g[0, -1] = g[-1, 0] = 1.0
    g[1:-1, 1:-1] = np.eye(dimK)
    return g


@dataclass(frozen=True, eq=False)
class MinkowskiRep:
    monoid: StarMonoid
    dimK: int
    blocks: np.ndarray  # (n, dimK+2, dimK+2) upper triangular
    lam: np.ndarray
    metric: np.ndarray
    evec: np.ndarray  # column e with e^dagger = (1, 0, ..., 0)
    mu: float = 1.0
    residuals: dict = field(default_factory=dict)
    gram_eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rank_tol: float = DEFAULT_TOL

    @property
    def edag(self) -> np.ndarray:
        return self.evec @ self.metric

    def block(self, b: str) -> np.ndarray:
        return self.blocks[self.monoid.idx(b)]

    def k(self) -> np.ndarray:
        return self.blocks[:, 1:-1, -1]

    def kstar(self) -> np.ndarray:
        return self.blocks[:, 0, 1:-1]

    def j(self) -> np.ndarray:
        return self.blocks[:, 1:-1, 1:-1]

    def pairing(self, x: np.ndarray, y: np.ndarray) -> complex:
        """Minkowski scalar product (x|y) = x^H g y."""
        return complex(np.conj(x) @ self.metric @ y)

    def scale(self) -> float:
        return max(1.0, float(np.abs(self.blocks).max(initial=0.0)) ** 2)


def assemble_minkowski(q: CanonicalQuadruple) -> MinkowskiRep:
    n, d = len(q.monoid), q.dimK
    B = np.zeros((n, d + 2, d + 2), dtype=complex)
    B[:, 0, 0] = 1.0
    B[:, -1, -1] = 1.0
    B[:, 0, 1:-1] = q.kstar
    B[:, 0, -1] = q.lam
    B[:, 1:-1, 1:-1] = q.j
    B[:, 1:-1, -1] = q.k
    e = np.zeros(d + 2)
    e[-1] = 1.0
    return MinkowskiRep(
        q.monoid, d, B, q.lam.copy(), minkowski_metric(d), e, q.mu, dict(q.residuals), q.gram_eigenvalues, q.rank_tol
    )


def minkowski_adjoint_matrix(L: np.ndarray, metric: np.ndarray) -> np.ndarray:
    return metric @ L.conj().T @ metric


def minkowski_adjoint(rep: MinkowskiRep, b: str) -> np.ndarray:
    """Pseudo-Euclidean conjugate g L^H g of j(b)."""
    return minkowski_adjoint_matrix(rep.block(b), rep.metric)


def polynorm(rep: MinkowskiRep, kvec: np.ndarray, h: str) -> float:
    """||j(h) k||, the seminorm of K indexed by h."""
    kvec = np.asarray(kvec, dtype=complex)
    if kvec.shape != (rep.dimK,):
        raise ValueError(f"vector of length {kvec.shape} does not match dimK={rep.dimK}")
    return float(np.linalg.norm(rep.j()[rep.monoid.idx(h)] @ kvec))


def representation_errors(rep: MinkowskiRep) -> dict[str, float]:
    """Max-abs error of every structural identity of the triangular representation."""
    m = rep.monoid
    n = len(m)
    B = rep.blocks
    g = rep.metric
    k, ks, j, lam_blk = rep.k(), rep.kstar(), rep.j(), B[:, 0, -1]
    T = m.table

    def mx(a):
        return float(np.abs(a).max(initial=0.0))

    mult = 0.0
    for a, b in iproduct(range(n), repeat=2):
        mult = max(mult, mx(B[a] @ B[b] - B[T[a, b]]))
    dagger = max(mx(minkowski_adjoint_matrix(B[b], g) - B[m.inv[b]]) for b in range(n))
    unit = mx(B[m.u] - np.eye(rep.dimK + 2))
    # kstar(a) k(c) = lam(ac) - lam(a) - lam(c)
    eq_e = mx(ks @ k.T - (lam_blk[T] - lam_blk[:, None] - lam_blk[None, :]))
    # j(a) k(c) = k(ac) - k(a)
    coc_k = mx(np.einsum("aij,cj->aci", j, k) - (k[T] - k[:, None, :]))
    # kstar(a) j(c) = kstar(ac) - kstar(c)
    coc_ks = mx(np.einsum("ai,cij->acj", ks, j) - (ks[T] - ks[None, :, :]))
    lam_herm = mx(lam_blk[m.inv] - np.conj(lam_blk))
    readback = mx(np.einsum("i,bij,j->b", rep.edag, B, rep.evec) - rep.lam)
    null = abs(complex(rep.edag @ rep.evec))
    return {
        "multiplicativity": mult,
        "dagger": dagger,
        "unitality": unit,
        "gram_identity": eq_e,
        "cocycle_k": coc_k,
        "cocycle_kstar": coc_ks,
        "lambda_hermitian": lam_herm,
        "lambda_readback": readback,
        "e_null": null,
    }


def verify_representation(rep: MinkowskiRep, tol: float = DEFAULT_TOL):
    """Check every identity; returns a RunReport with one entry per identity."""
    from .report import RunReport, check

    scale = rep.scale()
    entries = [check(name, err, tol * scale) for name, err in representation_errors(rep).items()]
    return RunReport(command="verify", entries=entries)
