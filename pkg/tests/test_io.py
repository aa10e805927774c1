from __future__ import annotations

import json

import numpy as np
import pytest

from qlevy.acceptance import CUMULANTS, ZERO_CUMULANTS, corpus_dir
from qlevy.gns import assemble_minkowski, build_canonical_quadruple, representation_errors
from qlevy.io import (
    InputError,
    bundle_from_json,
    bundle_to_json,
    field_from_json,
    field_to_json,
    functional_from_json,
    functional_to_json,
    load_functional,
    load_monoid,
    matrix_rep_from_json,
    matrix_rep_to_json,
    monoid_from_json,
    read_json,
)
from qlevy.oracle import regular_representation
from qlevy.report import CheckEntry, RunReport

from conftest import MONOIDS


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_monoid_round_trip(name):
    m = MONOIDS[name]
    assert monoid_from_json(json.loads(json.dumps(m.to_json()))) == m


def test_functional_round_trip_and_name_mismatch(corpus):
    m, l = corpus("z3", "z3_drift")
    back = functional_from_json(json.loads(json.dumps(functional_to_json(l))), m)
    assert np.array_equal(back.values, l.values) and back.name == l.name
    with pytest.raises(InputError, match="functional is for monoid 'Z3', got 'Z5'"):
        functional_from_json(functional_to_json(l), MONOIDS["Z5"])


def test_unknown_element_and_bad_number(tmp_path):
    m = MONOIDS["Z3"]
    with pytest.raises(InputError, match=r"values\['7'\]"):
        functional_from_json({"values": {"7": 1.0}}, m)
    with pytest.raises(InputError, match=r"values\['1'\]: expected a number"):
        functional_from_json({"values": {"0": 0, "1": "x", "2": 0}}, m)


def test_read_json_errors(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"a": 1,,}')
    with pytest.raises(InputError, match="broken.json: malformed JSON at line 1"):
        read_json(p)
    with pytest.raises(InputError, match="no such file"):
        read_json(tmp_path / "missing.json")


def test_hermitian_requirement(cpath):
    m = load_monoid(cpath("z3"))
    load_functional(cpath("z3_nonhermitian"), m)
    with pytest.raises(InputError, match=r"not Hermitian at values\['1'\]"):
        load_functional(cpath("z3_nonhermitian"), m, hermitian=True)


@pytest.mark.parametrize("mname,fname", CUMULANTS + ZERO_CUMULANTS)
def test_bundle_round_trip(corpus, mname, fname):
    m, l = corpus(mname, fname)
    rep = assemble_minkowski(build_canonical_quadruple(m, l))
    back = bundle_from_json(json.loads(json.dumps(bundle_to_json(rep))))
    assert back.monoid == m and back.dimK == rep.dimK
    assert np.array_equal(back.blocks, rep.blocks)
    assert max(representation_errors(back).values()) <= 1e-10


def test_bundle_shape_mismatch(corpus):
    m, l = corpus("z2", "z2_gamma1")
    d = bundle_to_json(assemble_minkowski(build_canonical_quadruple(m, l)))
    d["dimK"] = 2
    with pytest.raises(InputError, match="does not match dimK=2"):
        bundle_from_json(d)


def test_matrix_rep_and_field_round_trip(cpath):
    m = MONOIDS["S3"]
    rep = regular_representation(m)
    back = matrix_rep_from_json(matrix_rep_to_json(rep), m)
    assert np.array_equal(back.pi, rep.pi)
    z5 = load_monoid(cpath("z5"))
    d = read_json(cpath("field8"))
    fs = field_from_json(d, z5, {"poisson": load_functional(cpath("z5_poisson"), z5)})
    again = field_from_json(field_to_json(fs), z5)
    assert again.cells == fs.cells and again.weights == fs.weights
    assert set(again.injections) == {"shift", "shift_double"}
    with pytest.raises(InputError, match="unknown functional 'poisson'"):
        field_from_json(d, z5, {})


def test_run_report_round_trip():
    r = RunReport("x", [CheckEntry("a", 0.0, 1e-9, True), CheckEntry("b", 2.0, 1.0, False)], {"t": 0.1}, "now", {"k": 1})
    back = RunReport.from_dict(json.loads(r.to_json()))
    assert back == r and not back.passed
    assert r.to_text().splitlines()[-1] == "OVERALL FAIL"
    assert r.to_text().splitlines()[0] == "CHECK a 0.000000e+00 1.000e-09 PASS"


def test_corpus_is_packaged():
    names = {p.stem for p in corpus_dir().glob("*.json")}
    assert {"z2", "z3", "z5", "s3", "bool", "field2", "field8", "z5_double"} <= names
