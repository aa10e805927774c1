"""End-to-end checks over the bundled corpus.

Each ``criterion_*`` function returns CheckEntry rows with tolerances
pinned here; ``run_corpus`` gathers them into one RunReport.
"""

from __future__ import annotations

import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import field as fld
from .cumulant import Cumulant, check_positive_definite, generating_state, validate_cumulant
from .builders import cyclic_group
from .gns import CanonicalQuadruple, assemble_minkowski, build_canonical_quadruple, representation_errors
from .io import InputError, field_from_json, load_action, load_functional, load_monoid, matrix_rep_from_json, read_json
from .oracle import bochner_grid_margin, centered_probe, cumulant_from_rep, random_functional
from .report import CheckEntry, RunReport, check
from .symmetry import CovarianceError, build_covariance, e_preserved, pseudo_isometry_error

TOL = 1e-9

# (monoid file, functional file) for every corpus cumulant; all are valid
CUMULANTS = [
    ("z2", "z2_gamma07"),
    ("z2", "z2_gamma1"),
    ("z2", "z2_gamma05"),
    ("z3", "z3_poisson"),
    ("z3", "z3_drift"),
    ("z4", "z4_character"),
    ("z5", "z5_poisson"),
    ("z5", "z5_inhomogeneous"),
    ("s3", "s3_poisson"),
    ("bool", "bool_gamma1"),
]
ZERO_CUMULANTS = [("z2", "z2_zero"), ("z3", "z3_zero"), ("z5", "z5_zero"), ("s3", "s3_zero"), ("bool", "bool_zero")]
# (monoid, matrix representation, seed for eta)
SYNTHETIC = [
    ("z3", "rep_z3_regular", 1),
    ("z5", "rep_z5_regular", 2),
    ("s3", "rep_s3_regular", 3),
    ("s3", "rep_s3_standard", 4),
    ("bool", "rep_bool_projection", 5),
]
MALFORMED = [
    # (kind, files, substring the diagnostic must contain)
    ("monoid", ("bad_missing_entry",), "missing product entry (1, 2)"),
    ("monoid", ("bad_assoc",), "associativity violation at (a, a, b)"),
    ("functional", ("z3", "z3_nonhermitian"), "values['1']"),
]


def corpus_dir() -> Path:
    return Path(str(resources.files("qlevy") / "corpus"))


def corpus_path(name: str) -> Path:
    return corpus_dir() / f"{name}.json"


def load_pair(mname: str, fname: str):
    m = load_monoid(corpus_path(mname))
    return m, load_functional(corpus_path(fname), m)


def synthetic_cumulants() -> list[tuple[str, Cumulant]]:
    out = []
    for mname, rname, seed in SYNTHETIC:
        m = load_monoid(corpus_path(mname))
        rep = matrix_rep_from_json(read_json(corpus_path(rname)), m, rname)
        rng = np.random.default_rng(seed)
        eta = (rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)) / np.sqrt(2 * rep.dim)
        out.append((f"{rname}#{seed}", cumulant_from_rep(rep, eta, name=f"{rname}#{seed}")))
    return out


def all_cumulants() -> list[tuple[str, Cumulant]]:
    out = []
    for mname, fname in CUMULANTS:
        _, l = load_pair(mname, fname)
        out.append((fname, l))
    return out + synthetic_cumulants()


def identity_suite(label: str, errs: dict, scale: float) -> list[CheckEntry]:
    """Full identity suite of the triangular representation at the construction tolerances."""
    return [
        check(f"{label}:gram_identity", errs["gram_identity"], 1e-10 * scale),
        check(f"{label}:cocycle_k", errs["cocycle_k"], 1e-10),
        check(f"{label}:cocycle_kstar", errs["cocycle_kstar"], 1e-10),
        check(f"{label}:multiplicativity", errs["multiplicativity"], 1e-10),
        check(f"{label}:dagger", errs["dagger"], 1e-12),
        check(f"{label}:lambda_readback", errs["lambda_readback"], 1e-12),
        check(f"{label}:e_null", errs["e_null"], 0.0),
    ]


def quadruple_suite(label: str, q: CanonicalQuadruple) -> list[CheckEntry]:
    return identity_suite(label, representation_errors(assemble_minkowski(q)), q.scale())


def criterion_1() -> list[CheckEntry]:
    """Construction identities over corpus and synthetic cumulants."""
    out = []
    items = all_cumulants()
    out.append(check("instance_count_shortfall", max(0, 15 - len(items)), 0))
    for name, l in items:
        q = build_canonical_quadruple(l.monoid, l, 1.0, TOL)
        out += quadruple_suite(name, q)
    return out


def criterion_2(seed: int = 0) -> list[CheckEntry]:
    """exp(t l) positivity and partition products over an 8-cell set."""
    out = []
    for name, l in all_cumulants():
        m = l.monoid
        for t in (0.1, 1.0, 10.0):
            rep = check_positive_definite(m, generating_state(m, l, t))
            out.append(check(f"{name}:psd[t={t}]", max(0.0, -rep.min_eigenvalue), 1e-10))
    fs = corpus_field("field8")
    rng = np.random.default_rng(seed)
    cells = list(fs.cells)
    worst = 0.0
    for _ in range(20):
        labels = rng.integers(0, rng.integers(1, 9), size=len(cells))
        parts = [[c for c, k in zip(cells, labels) if k == g] for g in sorted(set(labels.tolist()))]
        for b in fs.monoid.elements:
            worst = max(worst, fld.check_divisibility(fs, b, cells, parts).max_error)
    out.append(check("field8:partition_products", worst, 1e-12))
    return out


def criterion_3(seed: int = 0, per_n: int = 100) -> list[CheckEntry]:
    """validate_cumulant against the Bochner-DFT grid and the centered probe on Z_n."""
    out = []
    rng = np.random.default_rng(seed)
    total = border = 0
    for n in range(2, 13):
        m = cyclic_group(n)
        disagree = contradict = 0
        for k in range(per_n):
            l = random_functional(m, rng, name=f"Z{n}#{k}")
            rep = validate_cumulant(m, l, TOL)
            total += 1
            scale = max(1.0, float(np.abs(l.values).max()))
            if abs(rep.min_gram_eigenvalue) < 10 * TOL * scale:
                border += 1
            else:
                grid_ok = bochner_grid_margin(m, l) >= -TOL
                disagree += grid_ok != rep.valid
            probe = centered_probe(m, l, trials=1000, seed=int(rng.integers(2**31)), tol=TOL)
            contradict += rep.valid and not probe.passed
        out.append(check(f"Z{n}:bochner_disagreements", disagree, 0))
        out.append(check(f"Z{n}:probe_contradictions", contradict, 0))
    out.append(check("borderline_fraction", border / total, 0.05))
    return out


def criterion_4() -> list[CheckEntry]:
    m, l = load_pair("z5", "z5_poisson")
    act, _ = load_action(corpus_path("z5_double"), m)
    q = build_canonical_quadruple(m, l)
    pair = build_covariance(q, q, act, tol=1e-10)
    e = pair.errors
    out = [
        check("z5_double:lstsq_residual", e["lstsq_residual"], 1e-10),
        check("z5_double:intertwining_j", e["intertwining_j"], 1e-10),
        check("z5_double:intertwining_minkowski", e["intertwining_minkowski"], 1e-10),
        check("z5_double:gram_invariance", e["gram_invariance"], 1e-10),
        check("z5_double:pseudo_isometry", pseudo_isometry_error(pair), 1e-10),
        check("z5_double:e_preserved", 0.0 if e_preserved(pair) else 1.0, 0.0),
    ]
    _, bad = load_pair("z5", "z5_inhomogeneous")
    qb = build_canonical_quadruple(m, bad)
    try:
        build_covariance(qb, qb, act, tol=1e-10)
        resid = 0.0
    except CovarianceError as exc:
        resid = exc.residual
    # must fail: residual above 1e-6
    out.append(check("z5_inhomogeneous:rejected", 1.0 if resid <= 1e-6 else 0.0, 0.0))
    return out


def corpus_field(name: str) -> fld.FieldSpace:
    d = read_json(corpus_path(name))
    funcs = {}
    mname = {"field2": "z2", "field8": "z5"}[name]
    m = load_monoid(corpus_path(mname))
    for fname in {v for v in d["densities"].values() if isinstance(v, str)}:
        funcs[fname] = load_functional(corpus_path(f"{mname}_{fname}"), m)
    return field_from_json(d, m, funcs, name)


def random_step(fs: fld.FieldSpace, rng, cells=None, p_unit: float = 0.3) -> fld.StepFunction:
    cells = list(fs.cells if cells is None else cells)
    els = fs.monoid.elements
    vals = {c: (fs.monoid.unit if rng.uniform() < p_unit else els[rng.integers(len(els))]) for c in cells}
    return fld.step(fs, vals)


def random_disjoint_family(fs: fld.FieldSpace, rng) -> list[fld.StepFunction]:
    cells = list(fs.cells)
    groups = rng.integers(0, rng.integers(1, len(cells) + 1), size=len(cells))
    return [random_step(fs, rng, [c for c, g in zip(cells, groups) if g == k]) for k in sorted(set(groups.tolist()))]


def criterion_5(seed: int = 0) -> list[CheckEntry]:
    rng = np.random.default_rng(seed)
    fs = corpus_field("field8")
    out = []
    worst = max(fld.check_chaotic(fs, random_disjoint_family(fs, rng)).max_error for _ in range(50))
    out.append(check("field8:chaotic", worst, 1e-12))

    worst = 0.0
    dom = [c for c in fs.cells if c in fs.injections["shift"].cell_map]
    for s in fs.injections:
        for _ in range(50):
            g = random_step(fs, rng, dom)
            a, b = fld.lambda_eval(fs, fld.act_on_step(fs, s, g)), fld.lambda_eval(fs, g)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    out.append(check("field8:s_homogeneity", worst, 1e-12))

    # refinement: split x3 into halves
    rf, kids = fld.refine(fs, "x3")
    worst_l = worst_p = 0.0
    for _ in range(50):
        g = random_step(fs, rng)
        g2 = fld.refine_step(g, "x3", kids)
        l1, l2 = fld.lambda_eval(fs, g), fld.lambda_eval(rf, g2)
        worst_l = max(worst_l, abs(l1 - l2))
        worst_p = max(worst_p, abs(np.exp(l1) - np.exp(l2)))
    q1, _ = fld.field_quadruple(fs, fs.cells)
    q2, _ = fld.field_quadruple(rf, rf.cells)
    worst_e = float(np.abs(q1.gram_products() - q2.gram_products()).max())
    worst_e = max(worst_e, float(np.abs(q1.lam - q2.lam).max()))
    out += [
        check("field8:refine_lambda", worst_l, 1e-10),
        check("field8:refine_phi", worst_p, 1e-10),
        check("field8:refine_gram_identity", worst_e, 1e-10),
    ]
    for name in ("field2", "field8"):
        f = corpus_field(name)
        q, _ = fld.field_quadruple(f, f.cells)
        out += quadruple_suite(f"{name}:field_rep", q)
    cov = fld.field_covariance(fs, "shift_double", fs.cells[:7])
    out.append(check("field8:covariance", cov.residual, 1e-10))
    return out


def criterion_6() -> list[CheckEntry]:
    mus = [0.1 / 2**k for k in range(9)]
    rep = fld.difference_quotient_check(-1.0 + 0j, None, mus)
    off = [max(0.4 - r, r - 0.6, 0.0) for r in rep.ratios]
    return [
        check("difference_quotient:ratio_band_excess", max(off), 0.0),
        check("difference_quotient:steps", len(mus) - 1 - len(rep.ratios), 0),
    ]


def criterion_7() -> list[CheckEntry]:
    out = []
    for mname, fname in ZERO_CUMULANTS:
        m, l = load_pair(mname, fname)
        q = build_canonical_quadruple(m, l)
        out.append(check(f"{fname}@{mname}:dimK", q.dimK, 0))
        out += quadruple_suite(f"{fname}@{mname}", q)
    m, l = load_pair("z4", "z4_character")
    q = build_canonical_quadruple(m, l)
    out.append(check("z4_character:rank_deficiency", 0 if q.dimK < len(m) - 1 else 1, 0))
    out.append(check("z4_character:j_residual", q.residuals["cocycle_lstsq"], 1e-9))
    out += quadruple_suite("z4_character", q)
    m, l = load_pair("s3", "s3_poisson")
    rep = matrix_rep_from_json(read_json(corpus_path("rep_s3_standard")), m)
    ls = cumulant_from_rep(rep, np.array([1.0, 0.0]))
    q = build_canonical_quadruple(m, ls)
    out.append(check("s3_standard:rank_deficiency", 0 if q.dimK < len(m) - 1 else 1, 0))
    out.append(check("s3_standard:j_residual", q.residuals["cocycle_lstsq"], 1e-9))
    out += quadruple_suite("s3_standard", q)
    return out


def criterion_8_fixtures() -> list[CheckEntry]:
    """In-process half of the CLI criterion: malformed inputs are rejected with a located diagnostic."""
    out = []
    for kind, files, needle in MALFORMED:
        try:
            m = load_monoid(corpus_path(files[0]))
            if kind == "functional":
                load_functional(corpus_path(files[1]), m, hermitian=True)
            msg = ""
        except InputError as exc:
            msg = str(exc)
        out.append(check(f"malformed:{files[-1]}", 0.0 if needle in msg else 1.0, 0.0))
    return out


CRITERIA = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8_fixtures,
}


def run_corpus(only=None) -> RunReport:
    report = RunReport(command="corpus")
    for key, fn in CRITERIA.items():
        if only and key not in only:
            continue
        t0 = time.perf_counter()
        report.extend(fn(), prefix=f"c{key}:")
        report.timings[f"criterion_{key}"] = round(time.perf_counter() - t0, 3)
    return report
