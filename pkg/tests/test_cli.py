from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qlevy.cli import main


def run(*args):
    p = subprocess.run([sys.executable, "-m", "qlevy", *map(str, args)], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def test_gns_then_verify(cpath, tmp_path):
    out = tmp_path / "rep.json"
    code, text, _ = run("gns", cpath("z2"), cpath("z2_gamma07"), "-o", out)
    assert code == 0 and text.rstrip().endswith("OVERALL PASS")
    code, text, _ = run("verify", out, "--format", "json")
    assert code == 0
    rep = json.loads(text)
    errs = {e["name"]: e["max_error"] for e in rep["entries"]}
    assert errs["gram_identity"] <= 1e-10 and errs["cocycle_k"] <= 1e-10 and errs["cocycle_kstar"] <= 1e-10


def test_validate_reports_violating_triple(cpath):
    code, _, err = run("validate", cpath("bad_assoc"))
    assert code == 2 and "(a, a, b)" in err and "bad_assoc.json" in err


def test_bochner_prints_spectrum(cpath):
    code, text, _ = run("oracle", "bochner", cpath("z3"), cpath("z3_poisson"), "--t", "1")
    assert code == 0
    line = next(x for x in text.splitlines() if x.startswith("INFO spectrum"))
    assert json.loads(line.split(" ", 2)[2]) == pytest.approx([1.7357589, 0.6321206, 0.6321206], abs=1e-6)


def test_exit_codes_in_process(cpath, capsys):
    assert main(["validate", str(cpath("z5")), str(cpath("z5_poisson")), "--symmetry", str(cpath("z5_double"))]) == 0
    assert main(["validate", str(cpath("z5")), str(cpath("z5_inhomogeneous")), "--symmetry", str(cpath("z5_double"))]) == 1
    assert main(["validate", str(cpath("z2")), str(cpath("z2_bad03"))]) == 1
    assert main(["validate", str(cpath("z5")), str(cpath("z3_poisson"))]) == 2
    assert main(["gns", str(cpath("z2")), str(cpath("z2_bad03"))]) == 1
    assert main(["gns", str(cpath("z2")), str(cpath("z2_bad03")), "--force"]) == 1
    assert main(["covariance", str(cpath("z5")), str(cpath("z5_poisson")), str(cpath("z5_double"))]) == 0
    assert main(["covariance", str(cpath("z5")), str(cpath("z5_inhomogeneous")), str(cpath("z5_double"))]) == 1
    assert main(["field", str(cpath("z5")), str(cpath("field8"))]) == 0
    assert main(["oracle", "probe", str(cpath("z2")), str(cpath("z2_bad03"))]) == 1
    assert main(["oracle", "synth", str(cpath("s3")), str(cpath("rep_s3_standard")), "--eta", "[[1, 0], [0, 1]]"]) == 0
    assert main(["oracle", "synth", str(cpath("s3")), str(cpath("rep_s3_standard")), "--eta", "[1]"]) == 2
    assert main(["nonsense"]) == 2
    err = capsys.readouterr().err
    assert "functional is for monoid 'Z3', got 'Z5'" in err


def test_field_step_evaluation(cpath, capsys):
    assert main(["field", str(cpath("z2")), str(cpath("field2")), "--step", str(cpath("step_z2")), "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["extra"]["lambda"] == pytest.approx([-1.0, 0.0])


def test_report_file_and_determinism(cpath, tmp_path, capsys):
    args = ["field", str(cpath("z5")), str(cpath("field8")), "--seed", "4", "--format", "json", "--no-timestamp"]
    main(args + ["--report", str(tmp_path / "a.json")])
    first = capsys.readouterr().out
    main(args)
    assert first == capsys.readouterr().out
    assert json.loads((tmp_path / "a.json").read_text()) == json.loads(first)
    main(args[:-1])
    stamped = json.loads(capsys.readouterr().out)
    assert "timestamp" in stamped and "total" in stamped["timings"]
