"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a verification fails,
2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import acceptance
from . import field as fld
from .cumulant import CumulantError, check_positive_definite, generating_state, validate_cumulant
from .gns import RepresentationError, assemble_minkowski, build_canonical_quadruple, verify_representation
from .io import (
    InputError,
    bundle_from_json,
    bundle_to_json,
    cnum,
    dump_json,
    field_from_json,
    functional_to_json,
    load_action,
    load_functional,
    load_monoid,
    matrix_rep_from_json,
    read_json,
    step_from_json,
)
from .oracle import bochner_check, centered_probe, cumulant_from_rep
from .report import CheckEntry, RunReport, check
from .symmetry import build_covariance, e_preserved, homogeneity_error, pseudo_isometry_error


class Failed(Exception):
    """A verification failed before a report could be completed."""


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-9, help="verification tolerance (default 1e-9)")
    p.add_argument("--rank-tol", type=float, default=1e-9, help="Gram rank cut-off (default 1e-9)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--force", action="store_true", help="carry invalid cumulants through the pipeline")
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamp and timings for byte-stable output")
    p.add_argument("--report", type=Path, help="also write the JSON report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qlevy", description="Finite star-monoid cumulants, their representations and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate monoid, functional, symmetry or field files")
    p.add_argument("monoid", type=Path)
    p.add_argument("functional", type=Path, nargs="?")
    p.add_argument("--symmetry", type=Path)
    p.add_argument("--field", type=Path)
    p.add_argument("--density", action="append", default=[], metavar="NAME=PATH")
    _common(p)

    p = sub.add_parser("gns", help="build the representation and write a bundle")
    p.add_argument("monoid", type=Path)
    p.add_argument("functional", type=Path)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("-o", "--output", type=Path)
    _common(p)

    p = sub.add_parser("verify", help="re-check every identity of a bundle")
    p.add_argument("bundle", type=Path)
    _common(p)

    p = sub.add_parser("covariance", help="build V_s for a symmetry and verify intertwining")
    p.add_argument("monoid", type=Path)
    p.add_argument("functional", type=Path)
    p.add_argument("symmetry", type=Path)
    p.add_argument("--target", type=Path, help="functional on the image cell (default: same)")
    _common(p)

    p = sub.add_parser("field", help="evaluate lambda/phi and run the field checks")
    p.add_argument("monoid", type=Path)
    p.add_argument("field", type=Path)
    p.add_argument("--step", type=Path)
    p.add_argument("--density", action="append", default=[], metavar="NAME=PATH")
    p.add_argument("--families", type=int, default=20)
    p.add_argument("--partitions", type=int, default=20)
    _common(p)

    p = sub.add_parser("oracle", help="independent positivity oracles")
    osub = p.add_subparsers(dest="oracle", required=True)
    q = osub.add_parser("bochner", help="DFT spectrum of exp(t l) on a cyclic group")
    q.add_argument("monoid", type=Path)
    q.add_argument("functional", type=Path)
    q.add_argument("--t", type=float, default=1.0)
    _common(q)
    q = osub.add_parser("probe", help="random centered quadratic-form probe")
    q.add_argument("monoid", type=Path)
    q.add_argument("functional", type=Path)
    q.add_argument("--trials", type=int, default=1000)
    _common(q)
    q = osub.add_parser("synth", help="functional from a matrix representation and a vector")
    q.add_argument("monoid", type=Path)
    q.add_argument("rep", type=Path)
    q.add_argument("--eta", help="JSON list of [re, im] pairs (default: seeded random)")
    q.add_argument("-o", "--output", type=Path)
    _common(q)

    p = sub.add_parser("corpus", help="run the full acceptance suite over the bundled corpus")
    p.add_argument("--only", help="comma-separated criterion numbers")
    _common(p)
    return parser


# -- helpers --------------------------------------------------------------


def _densities(args, field_path: Path, m) -> dict:
    """Functionals referenced by name in a field file."""
    out = {}
    for item in args.density:
        name, _, path = item.partition("=")
        if not path:
            raise InputError(f"--density {item!r}: expected NAME=PATH")
        out[name] = load_functional(Path(path), m, hermitian=True, tol=args.tol)
    raw = read_json(field_path).get("densities", {})
    for v in raw.values():
        if isinstance(v, str) and v not in out:
            for cand in (field_path.parent / f"{v}.json", field_path.parent / f"{m.name.lower()}_{v}.json"):
                if cand.exists():
                    out[v] = load_functional(cand, m, hermitian=True, tol=args.tol)
                    break
    return out


def _load_field(args, m):
    funcs = _densities(args, args.field, m)
    return field_from_json(read_json(args.field), m, funcs, str(args.field), args.tol)


def _cumulant_entries(m, l, tol) -> list[CheckEntry]:
    rep = validate_cumulant(m, l, tol)
    return [
        check(f"{l.name}:unit_zero", 0.0 if rep.unit_zero else abs(l.values[m.u]), 0.0),
        check(f"{l.name}:hermitian", rep.hermitian_error, tol * max(1.0, float(np.abs(l.values).max()))),
        CheckEntry(f"{l.name}:conditional_positivity", max(0.0, -rep.min_gram_eigenvalue), tol, rep.valid),
    ]


# -- subcommands ----------------------------------------------------------


def cmd_validate(args) -> RunReport:
    r = RunReport("validate")
    m = load_monoid(args.monoid)
    r.entries.append(check(f"monoid[{m.name}]:axioms", 0.0, 0.0))
    l = None
    if args.functional:
        l = load_functional(args.functional, m, hermitian=True, tol=args.tol)
        r.entries += _cumulant_entries(m, l, args.tol)
    if args.symmetry:
        act, _ = load_action(args.symmetry, m)
        r.entries.append(check(f"symmetry[{act.name}]:endomorphism", 0.0, 0.0))
        if l is not None:
            r.entries.append(check(f"symmetry[{act.name}]:homogeneity", homogeneity_error(l, act), args.tol))
    if args.field:
        fs = _load_field(args, m)
        r.entries.append(check("field:structure", 0.0, 0.0))
        for s in fs.injections:
            r.entries.append(fld.check_field_homogeneity(fs, s, args.tol))
    return r


def _quadruple(args, m, l, mu=1.0):
    try:
        return build_canonical_quadruple(m, l, mu, args.rank_tol, tol=args.tol, force=args.force)
    except (CumulantError, RepresentationError) as exc:
        raise Failed(str(exc)) from None


def cmd_gns(args) -> RunReport:
    m = load_monoid(args.monoid)
    l = load_functional(args.functional, m, hermitian=not args.force, tol=args.tol)
    rep = assemble_minkowski(_quadruple(args, m, l, args.mu))
    r = verify_representation(rep, args.tol)
    r.command = "gns"
    r.extra = {"dimK": rep.dimK, "residuals": {k: float(v) for k, v in sorted(rep.residuals.items())}}
    if args.output:
        args.output.write_text(dump_json(bundle_to_json(rep)) + "\n", encoding="utf-8")
        r.extra["bundle"] = str(args.output)
    return r


def cmd_verify(args) -> RunReport:
    rep = bundle_from_json(read_json(args.bundle), str(args.bundle))
    r = verify_representation(rep, args.tol)
    r.extra = {"dimK": rep.dimK}
    return r


def cmd_covariance(args) -> RunReport:
    m = load_monoid(args.monoid)
    l = load_functional(args.functional, m, hermitian=True, tol=args.tol)
    lt = load_functional(args.target, m, hermitian=True, tol=args.tol) if args.target else l
    act, _ = load_action(args.symmetry, m)
    qx, qy = _quadruple(args, m, l), _quadruple(args, m, lt)
    pair = build_covariance(qx, qy, act, args.tol, strict=False)
    scale = max(qx.scale(), qy.scale())
    r = RunReport("covariance")
    r.entries = [check(k, v, args.tol * scale) for k, v in pair.errors.items()]
    r.entries.append(check("pseudo_isometry", pseudo_isometry_error(pair), args.tol * scale))
    r.entries.append(check("e_preserved", 0.0 if e_preserved(pair) else 1.0, 0.0))
    r.extra = {"V_s": [[cnum(z) for z in row] for row in pair.Vs]}
    return r


def cmd_field(args) -> RunReport:
    m = load_monoid(args.monoid)
    fs = _load_field(args, m)
    rng = np.random.default_rng(args.seed)
    r = RunReport("field")
    if args.step:
        g = step_from_json(read_json(args.step), fs, str(args.step))
        r.extra = {"lambda": cnum(fld.lambda_eval(fs, g)), "phi": cnum(fld.phi_eval(fs, g))}
    worst = 0.0
    for _ in range(args.families):
        worst = max(worst, fld.check_chaotic(fs, acceptance.random_disjoint_family(fs, rng)).max_error)
    r.entries.append(check("chaotic_multiplicativity", worst, args.tol))
    cells = list(fs.cells)
    worst = 0.0
    for _ in range(args.partitions):
        labels = rng.integers(0, rng.integers(1, len(cells) + 1), size=len(cells))
        parts = [[c for c, k in zip(cells, labels) if k == g] for g in sorted(set(labels.tolist()))]
        for b in m.elements:
            worst = max(worst, fld.check_divisibility(fs, b, cells, parts).max_error)
    r.entries.append(check("infinite_divisibility", worst, args.tol))
    for s in fs.injections:
        r.entries.append(fld.check_field_homogeneity(fs, s, args.tol))
    return r


def cmd_oracle(args) -> RunReport:
    m = load_monoid(args.monoid)
    r = RunReport(f"oracle {args.oracle}")
    if args.oracle == "synth":
        rep = matrix_rep_from_json(read_json(args.rep), m, str(args.rep))
        if args.eta:
            try:
                eta = np.array([complex(*z) if isinstance(z, list) else complex(z) for z in json.loads(args.eta)])
            except (ValueError, TypeError) as exc:
                raise InputError(f"--eta: {exc}") from None
        else:
            rng = np.random.default_rng(args.seed)
            eta = (rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)) / np.sqrt(2 * rep.dim)
        if eta.shape != (rep.dim,):
            raise InputError(f"--eta: expected {rep.dim} entries, got {eta.size}")
        l = cumulant_from_rep(rep, eta, name=args.rep.stem)
        r.entries += _cumulant_entries(m, l, args.tol)
        r.extra = {"functional": functional_to_json(l)}
        if args.output:
            args.output.write_text(dump_json(functional_to_json(l)) + "\n", encoding="utf-8")
        return r
    l = load_functional(args.functional, m, hermitian=True, tol=args.tol)
    if args.oracle == "bochner":
        try:
            phi = generating_state(m, l, args.t, force=True, tol=args.tol)
            b = bochner_check(m, phi, args.tol)
        except ValueError as exc:
            raise InputError(f"{args.monoid}: {exc}") from None
        r.entries.append(CheckEntry("bochner_spectrum_nonnegative", max(0.0, -float(b.spectrum.min())), args.tol, b.passed))
        pd = check_positive_definite(m, phi, args.tol)
        r.entries.append(CheckEntry("state_matrix_psd", max(0.0, -pd.min_eigenvalue), args.tol, pd.passed))
        r.extra = {"t": args.t, "spectrum": [float(x) for x in b.spectrum]}
    else:
        p = centered_probe(m, l, args.trials, args.seed, args.tol)
        r.entries.append(CheckEntry("centered_probe", max(0.0, -p.min_observed), args.tol, p.passed))
        r.extra = {"trials": args.trials, "min_observed": p.min_observed}
    return r


def cmd_corpus(args) -> RunReport:
    only = set(args.only.split(",")) if args.only else None
    return acceptance.run_corpus(only)


COMMANDS = {
    "validate": cmd_validate,
    "gns": cmd_gns,
    "verify": cmd_verify,
    "covariance": cmd_covariance,
    "field": cmd_field,
    "oracle": cmd_oracle,
    "corpus": cmd_corpus,
}


def _emit(r: RunReport, args) -> None:
    if args.format == "json":
        print(r.to_json())
    else:
        for k in sorted(r.extra):
            print(f"INFO {k} {json.dumps(r.extra[k], sort_keys=True)}")
        print(r.to_text())
    if args.report:
        args.report.write_text(r.to_json() + "\n", encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return 2 if exc.code else 0
    t0 = time.perf_counter()
    try:
        r = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Failed as exc:
        r = RunReport(args.command, [CheckEntry("pipeline", 1.0, args.tol, False)], extra={"error": str(exc)})
    if args.no_timestamp:
        r.timings = {}
        r.timestamp = None
    else:
        r.timings.setdefault("total", round(time.perf_counter() - t0, 3))
        r.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    _emit(r, args)
    return 0 if r.passed else 1


if __name__ == "__main__":
    sys.exit(main())
