"""JSON encodings of monoids, functionals, actions, fields, steps and bundles.

Complex numbers are written as [re, im].  Every loader raises InputError
naming the file and the offending location.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from .cumulant import Cumulant, CumulantError
from .field import FieldError, FieldSpace, Injection, StepFunction, make_field, step
from .gns import MinkowskiRep, minkowski_metric
from .monoid import MonoidError, StarMonoid, validate_monoid
from .oracle import MatrixStarRep, OracleError, make_matrix_rep
from .symmetry import ActionError, EndomorphismAction, validate_action


class InputError(ValueError):
    pass


def read_json(path) -> Any:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cnum(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def parse_complex(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise InputError(f"{where}: expected a number or [re, im], got {v!r}")


def carray(a: np.ndarray):
    a = np.asarray(a)
    if a.ndim == 0:
        return cnum(a)
    return [carray(x) for x in a]


def parse_carray(v, shape_hint: str, where: str) -> np.ndarray:
    def rec(x, path):
        if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
            return complex(x[0], x[1])
        if isinstance(x, list):
            return [rec(t, f"{path}[{i}]") for i, t in enumerate(x)]
        raise InputError(f"{where}{path}: expected {shape_hint} of [re, im] pairs")

    return np.array(rec(v, ""), dtype=complex)


# -- monoid ---------------------------------------------------------------


def monoid_from_json(d: Mapping, where: str = "monoid") -> StarMonoid:
    if not isinstance(d, Mapping):
        raise InputError(f"{where}: expected an object")
    try:
        return validate_monoid(d)
    except MonoidError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_monoid(path) -> StarMonoid:
    return monoid_from_json(read_json(path), str(path))


# -- functional -----------------------------------------------------------


def functional_to_json(l: Cumulant) -> dict:
    return {"monoid": l.monoid.name, "name": l.name, "values": {b: cnum(v) for b, v in zip(l.monoid.elements, l.values)}}


def functional_from_json(d: Mapping, m: StarMonoid, where: str = "functional") -> Cumulant:
    if not isinstance(d, Mapping) or "values" not in d:
        raise InputError(f"{where}: expected an object with 'values'")
    if "monoid" in d and d["monoid"] != m.name:
        raise InputError(f"{where}: functional is for monoid {d['monoid']!r}, got {m.name!r}")
    vals = d["values"]
    for b in vals:
        if b not in m.index:
            raise InputError(f"{where}: values[{b!r}] is not an element of {m.name!r}")
    parsed = {b: parse_complex(v, f"{where}: values[{b!r}]") for b, v in vals.items()}
    try:
        return Cumulant.from_dict(m, parsed, str(d.get("name", Path(where).stem)))
    except CumulantError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_functional(path, m: StarMonoid, *, hermitian: bool = False, tol: float = 1e-9) -> Cumulant:
    """Load a functional; with ``hermitian`` a non-Hermitian entry is an input error."""
    l = functional_from_json(read_json(path), m, str(path))
    if hermitian:
        require_hermitian(l, str(path), tol)
    return l


def require_hermitian(l: Cumulant, where: str, tol: float = 1e-9) -> None:
    m = l.monoid
    scale = max(1.0, float(np.abs(l.values).max(initial=0.0)))
    for i, b in enumerate(m.elements):
        err = abs(l.values[m.inv[i]] - np.conj(l.values[i]))
        if err > tol * scale:
            raise InputError(
                f"{where}: functional is not Hermitian at values[{b!r}]: l({m.adjoint(b)}) != conj(l({b})) (error {err:.3g})"
            )


# -- symmetry -------------------------------------------------------------


def action_from_json(d: Mapping, m: StarMonoid, where: str = "symmetry") -> EndomorphismAction:
    if not isinstance(d, Mapping) or "theta" not in d:
        raise InputError(f"{where}: expected an object with 'theta'")
    try:
        return validate_action(m, {str(k): str(v) for k, v in d["theta"].items()}, str(d.get("name", "s")))
    except ActionError as exc:
        raise InputError(f"{where}: {exc}") from None


def load_action(path, m: StarMonoid) -> tuple[EndomorphismAction, Optional[dict]]:
    d = read_json(path)
    act = action_from_json(d, m, str(path))
    cm = d.get("cell_map")
    return act, (dict(cm) if cm is not None else None)


# -- field ----------------------------------------------------------------


def field_from_json(
    d: Mapping, m: StarMonoid, functionals: Mapping[str, Cumulant] | None = None, where: str = "field", tol: float = 1e-9
) -> FieldSpace:
    """Field JSON; densities are functional names (looked up in ``functionals``) or inline value maps."""
    functionals = functionals or {}
    try:
        cells = d["cells"]
        weights = {str(c["id"]): float(c["weight"]) for c in cells}
    except (KeyError, TypeError) as exc:
        raise InputError(f"{where}: cells must be a list of {{'id', 'weight'}} objects ({exc})") from None
    dens = {}
    raw = d.get("densities", {})
    for c in weights:
        if c not in raw:
            raise InputError(f"{where}: densities[{c!r}] missing")
        v = raw[c]
        if isinstance(v, str):
            if v not in functionals:
                raise InputError(f"{where}: densities[{c!r}] names unknown functional {v!r}")
            dens[c] = functionals[v]
        else:
            body = v if "values" in v else {"values": v}
            dens[c] = functional_from_json({**body, "monoid": m.name}, m, f"{where}: densities[{c!r}]")
    inj = []
    for k, s in enumerate(d.get("injections", [])):
        act = action_from_json(s, m, f"{where}: injections[{k}]")
        inj.append(Injection(str(s.get("name", f"s{k}")), dict(s.get("cell_map", {})), act))
    try:
        return make_field(m, weights, dens, inj, tol=tol)
    except FieldError as exc:
        raise InputError(f"{where}: {exc}") from None


def field_to_json(fs: FieldSpace) -> dict:
    return {
        "cells": [{"id": c, "weight": fs.weights[c]} for c in fs.cells],
        "densities": {c: {b: cnum(v) for b, v in fs.densities[c].as_dict().items()} for c in fs.cells},
        "injections": [
            {"name": s.name, "cell_map": dict(s.cell_map), "theta": s.action.as_dict()} for s in fs.injections.values()
        ],
    }


def step_from_json(d: Mapping, fs: FieldSpace, where: str = "step") -> StepFunction:
    if not isinstance(d, Mapping) or "support" not in d:
        raise InputError(f"{where}: expected an object with 'support'")
    try:
        return step(fs, {str(k): str(v) for k, v in d["support"].items()})
    except (FieldError, KeyError) as exc:
        raise InputError(f"{where}: {exc}") from None


# -- representation bundle ------------------------------------------------


def bundle_to_json(rep: MinkowskiRep) -> dict:
    m = rep.monoid
    els = m.elements
    return {
        "monoid": m.to_json(),
        "mu": rep.mu,
        "dimK": rep.dimK,
        "lambda": {b: cnum(rep.lam[i]) for i, b in enumerate(els)},
        "k": {b: carray(rep.k()[i]) for i, b in enumerate(els)},
        "j": {b: carray(rep.j()[i]) for i, b in enumerate(els)},
        "gram_eigenvalues": [float(x) for x in rep.gram_eigenvalues],
        "residuals": {k: float(v) for k, v in rep.residuals.items()},
        "rank_tol": rep.rank_tol,
    }


def bundle_from_json(d: Mapping, where: str = "bundle") -> MinkowskiRep:
    """Rebuild the triangular blocks from (lambda, k, j); kstar is derived as k(b*)^H."""
    for key in ("monoid", "dimK", "lambda", "k", "j"):
        if key not in d:
            raise InputError(f"{where}: missing field {key!r}")
    m = monoid_from_json(d["monoid"], f"{where}: monoid")
    D = int(d["dimK"])
    n = len(m)
    lam = np.array([parse_complex(d["lambda"].get(b), f"{where}: lambda[{b!r}]") for b in m.elements])
    k = np.zeros((n, D), dtype=complex)
    j = np.zeros((n, D, D), dtype=complex)
    for i, b in enumerate(m.elements):
        if b not in d["k"] or b not in d["j"]:
            raise InputError(f"{where}: k or j has no entry for {b!r}")
        kb = parse_carray(d["k"][b], "a vector", f"{where}: k[{b!r}]") if D else np.zeros(0)
        jb = parse_carray(d["j"][b], "a matrix", f"{where}: j[{b!r}]") if D else np.zeros((0, 0))
        if kb.shape != (D,) or jb.shape != (D, D):
            raise InputError(f"{where}: k[{b!r}] or j[{b!r}] does not match dimK={D}")
        k[i], j[i] = kb, jb
    B = np.zeros((n, D + 2, D + 2), dtype=complex)
    B[:, 0, 0] = B[:, -1, -1] = 1.0
    B[:, 0, 1:-1] = np.conj(k[m.inv])
    B[:, 0, -1] = lam
    B[:, 1:-1, 1:-1] = j
    B[:, 1:-1, -1] = k
    e = np.zeros(D + 2)
    e[-1] = 1.0
    return MinkowskiRep(
        m,
        D,
        B,
        lam,
        minkowski_metric(D),
        e,
        float(d.get("mu", 1.0)),
        dict(d.get("residuals", {})),
        np.array(d.get("gram_eigenvalues", []), dtype=float),
        float(d.get("rank_tol", 1e-9)),
    )


# -- matrix representations ------------------------------------------------


def matrix_rep_from_json(d: Mapping, m: StarMonoid, where: str = "rep") -> MatrixStarRep:
    if "pi" not in d:
        raise InputError(f"{where}: missing field 'pi'")
    if "monoid" in d and d["monoid"] != m.name:
        raise InputError(f"{where}: representation is for monoid {d['monoid']!r}, got {m.name!r}")
    pi = {}
    for b in m.elements:
        if b not in d["pi"]:
            raise InputError(f"{where}: pi[{b!r}] missing")
        pi[b] = parse_carray(d["pi"][b], "a matrix", f"{where}: pi[{b!r}]")
    try:
        return make_matrix_rep(m, pi)
    except OracleError as exc:
        raise InputError(f"{where}: {exc}") from None


def matrix_rep_to_json(rep: MatrixStarRep) -> dict:
    return {
        "monoid": rep.monoid.name,
        "dim": rep.dim,
        "pi": {b: carray(rep.pi[i]) for i, b in enumerate(rep.monoid.elements)},
    }
