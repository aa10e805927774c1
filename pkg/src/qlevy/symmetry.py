"""Symmetry actions theta_s on the monoid and the covariance isometries V_s."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Mapping, Optional, Union

import numpy as np

from .cumulant import Cumulant, DEFAULT_TOL
from .gns import CanonicalQuadruple, assemble_minkowski, minkowski_metric
from .monoid import StarMonoid


class ActionError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(self.diagnostics[0])


class CovarianceError(ValueError):
    def __init__(self, msg: str, residual: float, pair: "CovariancePair | None" = None):
        super().__init__(msg)
        self.residual = residual
        self.pair = pair


@dataclass(frozen=True, eq=False)
class EndomorphismAction:
    monoid: StarMonoid
    name: str
    theta: np.ndarray  # theta[i] = index of theta_s(elements[i])

    def __call__(self, b: str) -> str:
        return self.monoid.elements[self.theta[self.monoid.idx(b)]]

    @property
    def image(self) -> tuple[str, ...]:
        return tuple(self.monoid.elements[i] for i in self.theta)

    def preimage(self, b: str) -> Optional[str]:
        """b^s: the unique preimage of b under theta_s, or None off the image."""
        hit = np.flatnonzero(self.theta == self.monoid.idx(b))
        return self.monoid.elements[hit[0]] if hit.size else None

    def compose(self, first: "EndomorphismAction", name: str | None = None) -> "EndomorphismAction":
        """self after first."""
        return EndomorphismAction(self.monoid, name or f"{self.name}.{first.name}", self.theta[first.theta])

    def as_dict(self) -> dict[str, str]:
        els = self.monoid.elements
        return {els[i]: els[t] for i, t in enumerate(self.theta)}


def identity_action(m: StarMonoid) -> EndomorphismAction:
    return EndomorphismAction(m, "id", np.arange(len(m)))


def validate_action(m: StarMonoid, mapping: Mapping[str, str], name: str = "s") -> EndomorphismAction:
    diags = []
    for b in m.elements:
        if b not in mapping:
            diags.append(f"theta is not total: no image for {b!r}")
        elif mapping[b] not in m.index:
            diags.append(f"theta({b}) = {mapping[b]!r} is not an element")
    if diags:
        raise ActionError(diags)
    theta = np.array([m.index[mapping[b]] for b in m.elements], dtype=np.int64)
    if theta[m.u] != m.u:
        diags.append("theta does not fix the unit")
    if len(set(theta.tolist())) != len(theta):
        seen: dict[int, int] = {}
        for i, t in enumerate(theta):
            if t in seen:
                diags.append(
                    f"theta is not injective: theta({m.elements[seen[t]]}) = theta({m.elements[i]})"
                )
                break
            seen[t] = i
    st = m.star_table
    for a, b in iproduct(range(len(m)), repeat=2):
        if theta[st[a, b]] != st[theta[a], theta[b]]:
            diags.append(f"theta does not preserve a*b at ({m.elements[a]}, {m.elements[b]})")
            break
    if diags:
        raise ActionError(diags)
    return EndomorphismAction(m, name, theta)


CumulantFamily = Union[Cumulant, Mapping[str, Cumulant]]


def homogeneity_error(
    l: CumulantFamily, action: EndomorphismAction, cell_map: Optional[Mapping[str, str]] = None
) -> float:
    """max |l_{s(i)}(theta(b)) - l_i(b)| over the injection's domain and all b."""
    th = action.theta
    if isinstance(l, Cumulant):
        return float(np.abs(l.values[th] - l.values).max(initial=0.0))
    if cell_map is None:
        cell_map = {c: c for c in l}
    err = 0.0
    for i, si in cell_map.items():
        if i not in l or si not in l:
            raise KeyError(f"cell {i if i not in l else si!r} has no density")
        err = max(err, float(np.abs(l[si].values[th] - l[i].values).max(initial=0.0)))
    return err


def check_homogeneity(
    l: CumulantFamily,
    action: EndomorphismAction,
    cell_map: Optional[Mapping[str, str]] = None,
    tol: float = DEFAULT_TOL,
) -> bool:
    return homogeneity_error(l, action, cell_map) <= tol


@dataclass(frozen=True, eq=False)
class CovariancePair:
    source: CanonicalQuadruple
    target: CanonicalQuadruple
    action: EndomorphismAction
    Vs: np.ndarray  # (target.dimK, source.dimK)
    VsMink: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return max(self.errors.values(), default=0.0)


def mink_block_diag(Vs: np.ndarray) -> np.ndarray:
    dt, ds = Vs.shape
    M = np.zeros((dt + 2, ds + 2), dtype=complex)
    M[0, 0] = M[-1, -1] = 1.0
    M[1:-1, 1:-1] = Vs
    return M


def covariance_errors(
    src: CanonicalQuadruple, tgt: CanonicalQuadruple, action: EndomorphismAction, Vs: np.ndarray
) -> dict[str, float]:
    th = action.theta
    Kx = src.k.T
    Ky = tgt.k[th].T

    def mx(a):
        return float(np.abs(a).max(initial=0.0))

    VK = Vs @ Kx
    ls = mx(VK - Ky)
    iso = mx(np.linalg.norm(VK, axis=0) - np.linalg.norm(Kx, axis=0))
    gram = mx(Ky.conj().T @ Ky - Kx.conj().T @ Kx)
    lam = mx(tgt.lam[th] - src.lam)
    inter = max((mx(Vs @ src.j[b] - tgt.j[th[b]] @ Vs) for b in range(len(src.monoid))), default=0.0)
    src_rep, tgt_rep = assemble_minkowski(src), assemble_minkowski(tgt)
    M = mink_block_diag(Vs)
    mink = max(mx(M @ src_rep.blocks[b] - tgt_rep.blocks[th[b]] @ M) for b in range(len(src.monoid)))
    return {
        "lstsq_residual": ls,
        "isometry": iso,
        "gram_invariance": gram,
        "lambda_homogeneity": lam,
        "intertwining_j": inter,
        "intertwining_minkowski": mink,
    }


def build_covariance(
    q_x: CanonicalQuadruple,
    q_sx: CanonicalQuadruple,
    action: EndomorphismAction,
    tol: float = 1e-10,
    *,
    strict: bool = True,
) -> CovariancePair:
    """Solve V_s k_x(b) = k_sx(theta_s b) by least squares and verify covariance.

    V_s is determined on the span of the k_x vectors (which is all of K_x
    for the truncated factorization).  With ``strict`` any error above
    ``tol * scale`` raises CovarianceError carrying the residual.
    """
    if q_x.monoid != action.monoid or q_sx.monoid != action.monoid:
        raise ValueError("quadruples and action live over different monoids")
    Kx = q_x.k.T
    Ky = q_sx.k[action.theta].T
    if q_x.dimK == 0 or q_sx.dimK == 0:
        Vs = np.zeros((q_sx.dimK, q_x.dimK), dtype=complex)
    else:
        Vs = Ky @ np.linalg.pinv(Kx)
    errs = covariance_errors(q_x, q_sx, action, Vs)
    pair = CovariancePair(q_x, q_sx, action, Vs, mink_block_diag(Vs), errs)
    scale = max(q_x.scale(), q_sx.scale())
    if strict and pair.residual > tol * scale:
        worst = max(errs, key=errs.get)
        raise CovarianceError(
            f"covariance for {action.name!r} fails: {worst} = {errs[worst]:.3g} > {tol * scale:.3g}",
            pair.residual,
            pair,
        )
    return pair


def pseudo_isometry_error(pair: CovariancePair) -> float:
    """|VsMink^H g_target VsMink - g_source| on the Minkowski space of the source."""
    M = pair.VsMink
    gt = minkowski_metric(pair.target.dimK)
    gs = minkowski_metric(pair.source.dimK)
    return float(np.abs(M.conj().T @ gt @ M - gs).max(initial=0.0))


def e_preserved(pair: CovariancePair) -> bool:
    es = np.zeros(pair.source.dimK + 2)
    es[-1] = 1.0
    et = np.zeros(pair.target.dimK + 2)
    et[-1] = 1.0
    return bool(np.array_equal(pair.VsMink @ es, et))
