"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Tolerances are pinned below as well as in ``qlevy.acceptance``; every
check a criterion emits must be at least as tight as the pinned value.
"""

from __future__ import annotations

import subprocess
import sys

import pytest

from qlevy import acceptance

# largest tolerance allowed per check-name suffix (None: scaled, checked separately)
PINNED = {
    "gram_identity": None,
    "cocycle_k": 1e-10,
    "cocycle_kstar": 1e-10,
    "multiplicativity": 1e-10,
    "dagger": 1e-12,
    "lambda_readback": 1e-12,
    "e_null": 0.0,
    "partition_products": 1e-12,
    "bochner_disagreements": 0,
    "probe_contradictions": 0,
    "borderline_fraction": 0.05,
    "lstsq_residual": 1e-10,
    "intertwining_j": 1e-10,
    "intertwining_minkowski": 1e-10,
    "gram_invariance": 1e-10,
    "e_preserved": 0.0,
    "rejected": 0.0,
    "chaotic": 1e-12,
    "s_homogeneity": 1e-12,
    "refine_lambda": 1e-10,
    "refine_phi": 1e-10,
    "refine_gram_identity": 1e-10,
    "ratio_band_excess": 0.0,
    "j_residual": 1e-9,
    "dimK": 0,
    "rank_deficiency": 0,
}
PSD_FLOOR = 1e-10


def _report(key, entries, capsys):
    bad = [e for e in entries if not e.passed]
    with capsys.disabled():
        status = "PASS" if not bad else "FAIL"
        worst = bad[0].line() if bad else f"{len(entries)} checks"
        print(f"\nCRITERION {key} {status} ({worst})")
    return bad


def _pinned(entries):
    for e in entries:
        suffix = e.name.rsplit(":", 1)[-1]
        if suffix.startswith("psd["):
            assert e.tolerance <= PSD_FLOOR, e.name
            continue
        if suffix in PINNED and PINNED[suffix] is not None:
            assert e.tolerance <= PINNED[suffix], e.name


@pytest.mark.parametrize("key", ["1", "2", "3", "4", "5", "6", "7"])
def test_criterion(key, capsys):
    entries = acceptance.CRITERIA[key]()
    assert entries
    _pinned(entries)
    bad = _report(key, entries, capsys)
    assert not bad, [e.line() for e in bad]


def test_criterion_1_covers_enough_instances():
    names = {n for n, _ in acceptance.all_cumulants()}
    assert len(acceptance.CUMULANTS) >= 10 and len(acceptance.SYNTHETIC) == 5
    assert len(names) == 15


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "qlevy", *map(str, args)], capture_output=True, text=True)


def test_criterion_8(capsys):
    entries = []
    a = _cli("corpus", "--no-timestamp", "--format", "json")
    b = _cli("corpus", "--no-timestamp", "--format", "json")
    entries.append(acceptance.check("corpus_exit", a.returncode, 0))
    entries.append(acceptance.check("deterministic", 0.0 if a.stdout == b.stdout and a.stdout else 1.0, 0.0))
    p = acceptance.corpus_path
    cases = [
        (("validate", p("bad_missing_entry")), "missing product entry (1, 2)"),
        (("validate", p("bad_assoc")), "associativity violation at (a, a, b)"),
        (("validate", p("z3"), p("z3_nonhermitian")), "values['1']"),
    ]
    for argv, needle in cases:
        r = _cli(*argv)
        ok = r.returncode == 2 and needle in r.stderr and argv[-1].name in r.stderr
        entries.append(acceptance.check(f"malformed:{argv[-1].stem}", 0.0 if ok else 1.0, 0.0))
    entries += acceptance.criterion_8_fixtures()
    bad = _report("8", entries, capsys)
    assert not bad, [e.line() for e in bad]
