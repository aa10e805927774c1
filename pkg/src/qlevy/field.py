"""Discrete measured index space, step maps and field-level functionals.

The index space (X, F, mu) is modelled by finitely many weighted cells;
integrals become weighted sums over cells.  A step map assigns a monoid
element to each cell and is stored by its support (cells with value
different from the unit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .cumulant import Cumulant, DEFAULT_TOL, validate_cumulant
from .gns import CanonicalQuadruple, MinkowskiRep, assemble_minkowski, build_canonical_quadruple
from .monoid import StarMonoid, star
from .report import CheckEntry, check
from .symmetry import (
    CovariancePair,
    EndomorphismAction,
    covariance_errors,
    homogeneity_error,
    mink_block_diag,
)


class FieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Injection:
    name: str
    cell_map: Mapping[str, str]
    action: EndomorphismAction

    def compose(self, first: "Injection", name: str | None = None) -> "Injection":
        """self after first, on the cells where the composite is defined."""
        cm = {i: self.cell_map[j] for i, j in first.cell_map.items() if j in self.cell_map}
        return Injection(name or f"{self.name}.{first.name}", cm, self.action.compose(first.action))


@dataclass(frozen=True, eq=False)
class FieldSpace:
    monoid: StarMonoid
    cells: tuple[str, ...]
    weights: Mapping[str, float]
    densities: Mapping[str, Cumulant]
    injections: Mapping[str, Injection] = field(default_factory=dict)

    def weight(self, cells: Iterable[str]) -> float:
        return sum(self.weights[c] for c in cells)

    def injection(self, s: Union[str, Injection]) -> Injection:
        if isinstance(s, Injection):
            return s
        try:
            return self.injections[s]
        except KeyError:
            raise FieldError(f"unknown injection {s!r}") from None

    def check_cells(self, cells: Iterable[str]) -> None:
        for c in cells:
            if c not in self.weights:
                raise FieldError(f"unknown cell {c!r}")


def make_field(
    m: StarMonoid,
    weights: Mapping[str, float],
    densities: Union[Cumulant, Mapping[str, Cumulant]],
    injections: Sequence[Injection] = (),
    *,
    tol: float = DEFAULT_TOL,
    validate: bool = True,
) -> FieldSpace:
    """Build a FieldSpace, checking weights, injections and (optionally) densities.

    A single Cumulant is used as the x-independent density of every cell.
    """
    cells = tuple(weights)
    w = {c: float(weights[c]) for c in cells}
    for c, v in w.items():
        if not v > 0:
            raise FieldError(f"cell {c!r} has non-positive weight {v}")
    if isinstance(densities, Cumulant):
        dens = {c: densities for c in cells}
    else:
        dens = dict(densities)
    for c in cells:
        if c not in dens:
            raise FieldError(f"cell {c!r} has no density")
        if dens[c].monoid != m:
            raise FieldError(f"density of cell {c!r} lives over another monoid")
        if validate:
            rep = validate_cumulant(m, dens[c], tol)
            if not rep.valid:
                raise FieldError(f"density of cell {c!r} is not a valid cumulant: {rep.as_dict()}")
    inj = {}
    for s in injections:
        targets = list(s.cell_map.values())
        if len(set(targets)) != len(targets):
            raise FieldError(f"injection {s.name!r} is not injective on cells")
        for i, si in s.cell_map.items():
            if i not in w or si not in w:
                raise FieldError(f"injection {s.name!r} maps outside the modelled cells ({i!r} -> {si!r})")
            if not math.isclose(w[i], w[si], rel_tol=1e-12, abs_tol=0.0):
                raise FieldError(f"injection {s.name!r} does not preserve weight at {i!r}")
        if s.action.monoid != m:
            raise FieldError(f"injection {s.name!r} acts on another monoid")
        inj[s.name] = s
    return FieldSpace(m, cells, w, dens, inj)


def shift_injection(cells: Sequence[str], action: EndomorphismAction, name: str = "shift", by: int = 1) -> Injection:
    """cells[i] -> cells[i + by] wherever defined."""
    cm = {cells[i]: cells[i + by] for i in range(len(cells) - by)}
    return Injection(name, cm, action)


# -- step maps ------------------------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    support: Mapping[str, str]
    unit: str

    def __call__(self, cell: str) -> str:
        return self.support.get(cell, self.unit)

    @property
    def cells(self) -> frozenset:
        return frozenset(self.support)

    def __hash__(self):
        return hash((frozenset(self.support.items()), self.unit))

    def as_dict(self) -> dict:
        return {"support": dict(self.support)}


def step(fs: FieldSpace, values: Mapping[str, str]) -> StepFunction:
    """Step map from a cell->element mapping; unit values are dropped from the support."""
    fs.check_cells(values)
    m = fs.monoid
    supp = {}
    for c in fs.cells:
        if c in values:
            m.idx(values[c])
            if values[c] != m.unit:
                supp[c] = values[c]
    return StepFunction(supp, m.unit)


def empty_step(fs: FieldSpace) -> StepFunction:
    return StepFunction({}, fs.monoid.unit)


def indicator(fs: FieldSpace, b: str, cells: Iterable[str]) -> StepFunction:
    """b-valued indicator: b on the given cells, unit elsewhere."""
    cells = list(cells)
    fs.check_cells(cells)
    return step(fs, {c: b for c in cells})


def pointwise_star(fs: FieldSpace, f: StepFunction, h: StepFunction) -> StepFunction:
    m = fs.monoid
    if f.unit != m.unit or h.unit != m.unit:
        raise FieldError("step maps live over a different monoid")
    cells = f.cells | h.cells
    return step(fs, {c: star(m, f(c), h(c)) for c in cells})


def pointwise_product(fs: FieldSpace, f: StepFunction, h: StepFunction) -> StepFunction:
    m = fs.monoid
    return step(fs, {c: m.mul(f(c), h(c)) for c in f.cells | h.cells})


def disjoint_union(f: StepFunction, h: StepFunction) -> StepFunction:
    overlap = f.cells & h.cells
    if overlap:
        raise FieldError(f"supports overlap on {sorted(overlap)}; disjoint union undefined")
    return StepFunction({**f.support, **h.support}, f.unit)


def union_all(fs: FieldSpace, family: Sequence[StepFunction]) -> StepFunction:
    g = empty_step(fs)
    for f in family:
        g = disjoint_union(g, f)
    return StepFunction({c: g.support[c] for c in fs.cells if c in g.support}, g.unit)


def decompose(g: StepFunction) -> list[StepFunction]:
    """Split g into indicators of its value preimages, in order of first appearance."""
    groups: dict[str, dict[str, str]] = {}
    for c, b in g.support.items():
        groups.setdefault(b, {})[c] = b
    return [StepFunction(sub, g.unit) for sub in groups.values()]


def lambda_eval(fs: FieldSpace, g: StepFunction) -> complex:
    """lambda(g) = sum over supp g of mu_i * l_i(g(i))."""
    tot = 0j
    for c, b in g.support.items():
        if c not in fs.densities:
            raise FieldError(f"no density for cell {c!r}")
        tot += fs.weights[c] * fs.densities[c](b)
    return tot


def phi_eval(fs: FieldSpace, g: StepFunction) -> complex:
    return complex(np.exp(lambda_eval(fs, g)))


def act_on_step(fs: FieldSpace, s: Union[str, Injection], g: StepFunction) -> StepFunction:
    """g_s: carries cell i to s(i) and values by theta_s; cells outside sX get the unit."""
    inj = fs.injection(s)
    out = {}
    for c, b in g.support.items():
        if c not in inj.cell_map:
            raise FieldError(f"support cell {c!r} escapes the domain of injection {inj.name!r}")
        out[inj.cell_map[c]] = inj.action(b)
    return step(fs, out)


# -- checks ---------------------------------------------------------------


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def check_chaotic(fs: FieldSpace, family: Sequence[StepFunction], tol: float = 1e-12) -> CheckEntry:
    """phi of the disjoint union equals the product of the phis (relative error)."""
    g = union_all(fs, family)
    prod = complex(np.prod([phi_eval(fs, f) for f in family])) if family else 1.0 + 0j
    return check("chaotic_multiplicativity", _rel(phi_eval(fs, g), prod), tol)


def check_divisibility(
    fs: FieldSpace, b: str, cells: Iterable[str], partition: Sequence[Iterable[str]], tol: float = 1e-12
) -> CheckEntry:
    cells = list(cells)
    parts = [list(p) for p in partition]
    flat = [c for p in parts for c in p]
    if len(flat) != len(set(flat)) or set(flat) != set(cells):
        raise FieldError("partition does not cover the cell set disjointly")
    whole = phi_eval(fs, indicator(fs, b, cells))
    prod = complex(np.prod([phi_eval(fs, indicator(fs, b, p)) for p in parts]))
    return check("infinite_divisibility", _rel(whole, prod), tol)


def check_field_homogeneity(fs: FieldSpace, s: Union[str, Injection], tol: float = DEFAULT_TOL) -> CheckEntry:
    inj = fs.injection(s)
    return check(f"homogeneity[{inj.name}]", homogeneity_error(fs.densities, inj.action, inj.cell_map), tol)


@dataclass
class QuotientReport:
    mus: list[float]
    quotients: list[complex]
    errors: list[float]
    ratios: list[float]
    passed: bool

    def as_dict(self) -> dict:
        return {
            "mu": self.mus,
            "q": [[z.real, z.imag] for z in self.quotients],
            "errors": self.errors,
            "ratios": self.ratios,
            "pass": self.passed,
        }


def difference_quotient_check(
    l: Union[Cumulant, complex], b: Optional[str], mus: Sequence[float], band: tuple[float, float] = (0.4, 0.6)
) -> QuotientReport:
    """q(mu) = (exp(mu l(b)) - 1)/mu against l(b); error ratios must show first-order convergence."""
    mus = [float(x) for x in mus]
    if any(x <= 0 for x in mus) or any(a <= c for a, c in zip(mus, mus[1:])):
        raise ValueError("weights must be positive and strictly decreasing")
    lb = l(b) if isinstance(l, Cumulant) else complex(l)
    qs = [complex(np.expm1(x * lb) / x) for x in mus]
    errs = [abs(q - lb) for q in qs]
    ratios = [e1 / e0 for e0, e1 in zip(errs, errs[1:]) if e0 > 0]
    if all(e == 0 for e in errs):
        ok = True
    else:
        ok = len(ratios) == len(errs) - 1 and all(band[0] <= r <= band[1] for r in ratios)
    return QuotientReport(mus, qs, errs, ratios, ok)


# -- field representation -------------------------------------------------


def field_quadruple(
    fs: FieldSpace, cells: Iterable[str], rank_tol: float = DEFAULT_TOL, *, tol: float = DEFAULT_TOL
) -> tuple[CanonicalQuadruple, dict[str, slice]]:
    """Direct sum of per-cell quadruples (built at unit weight) over the cell set.

    k carries sqrt(mu_i) per cell so that kstar k reproduces the weighted
    sum of the cell kernels.  Returns the quadruple and the K-coordinate
    slice of each cell.
    """
    m = fs.monoid
    cells = [c for c in fs.cells if c in set(cells)]
    per = {c: build_canonical_quadruple(m, fs.densities[c], 1.0, rank_tol, tol=tol) for c in cells}
    dims = [per[c].dimK for c in cells]
    D = sum(dims)
    n = len(m)
    k = np.zeros((n, D), dtype=complex)
    j = np.zeros((n, D, D), dtype=complex)
    lam = np.zeros(n, dtype=complex)
    slices = {}
    off = 0
    resid = 0.0
    for c, d in zip(cells, dims):
        sl = slice(off, off + d)
        slices[c] = sl
        w = fs.weights[c]
        k[:, sl] = math.sqrt(w) * per[c].k
        j[:, sl, sl] = per[c].j
        lam += w * fs.densities[c].values
        resid = max(resid, per[c].residuals.get("cocycle_lstsq", 0.0))
        off += d
    if D == 0:
        j = np.zeros((n, 0, 0), dtype=complex)
    eig = np.sort(np.concatenate([fs.weights[c] * per[c].gram_eigenvalues for c in cells]) if cells else np.zeros(0))[::-1]
    q = CanonicalQuadruple(m, fs.weight(cells), D, k, j, lam, eig, {"cocycle_lstsq": resid}, rank_tol)
    return q, slices


def assemble_field_rep(
    fs: FieldSpace, cells: Iterable[str], rank_tol: float = DEFAULT_TOL, *, tol: float = DEFAULT_TOL
) -> MinkowskiRep:
    q, _ = field_quadruple(fs, cells, rank_tol, tol=tol)
    return assemble_minkowski(q)


def field_covariance(
    fs: FieldSpace, s: Union[str, Injection], cells: Iterable[str], rank_tol: float = DEFAULT_TOL
) -> CovariancePair:
    """Block V_s : K_Delta -> K_{s Delta} assembled from per-cell least-squares isometries."""
    inj = fs.injection(s)
    cells = [c for c in fs.cells if c in set(cells)]
    for c in cells:
        if c not in inj.cell_map:
            raise FieldError(f"cell {c!r} is outside the domain of injection {inj.name!r}")
    image = [inj.cell_map[c] for c in cells]
    qx, sx = field_quadruple(fs, cells, rank_tol)
    qy, sy = field_quadruple(fs, image, rank_tol)
    m = fs.monoid
    V = np.zeros((qy.dimK, qx.dimK), dtype=complex)
    for c in cells:
        t = inj.cell_map[c]
        Kx = qx.k[:, sx[c]].T
        Ky = qy.k[inj.action.theta][:, sy[t]].T
        if Kx.shape[0] and Ky.shape[0]:
            V[sy[t], sx[c]] = Ky @ np.linalg.pinv(Kx)
    errs = covariance_errors(qx, qy, inj.action, V)
    return CovariancePair(qx, qy, inj.action, V, mink_block_diag(V), errs)


# -- refinement -----------------------------------------------------------


def refine(fs: FieldSpace, cell: str, parts: int = 2) -> tuple[FieldSpace, list[str]]:
    """Split a cell into equal-weight children carrying the same density.

    Injections touching the split cell are dropped (they would no longer be
    weight preserving).  Returns the new space and the child ids.
    """
    fs.check_cells([cell])
    kids = [f"{cell}/{p}" for p in range(parts)]
    cells: list[str] = []
    for c in fs.cells:
        cells.extend(kids if c == cell else [c])
    weights = {c: (fs.weights[cell] / parts if c in kids else fs.weights[c]) for c in cells}
    dens = {c: (fs.densities[cell] if c in kids else fs.densities[c]) for c in cells}
    inj = [s for s in fs.injections.values() if cell not in s.cell_map and cell not in s.cell_map.values()]
    return make_field(fs.monoid, weights, dens, inj, validate=False), kids


def refine_step(g: StepFunction, cell: str, kids: Sequence[str]) -> StepFunction:
    if cell not in g.support:
        return g
    supp = {}
    for c, b in g.support.items():
        if c == cell:
            supp.update({k: b for k in kids})
        else:
            supp[c] = b
    return StepFunction(supp, g.unit)
