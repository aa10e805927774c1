from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlevy.cumulant import Cumulant, GeneratingState, generating_state, validate_cumulant
from qlevy.gns import build_canonical_quadruple
from qlevy.oracle import (
    OracleError,
    bochner_check,
    bochner_spectrum,
    centered_probe,
    cumulant_from_rep,
    cyclic_order,
    make_matrix_rep,
    random_functional,
    regular_representation,
)

from conftest import MONOIDS, cumulant, z2_gamma


def test_bochner_examples(corpus):
    m, l = corpus("z3", "z3_poisson")
    r = bochner_check(m, generating_state(m, l, 1.0))
    assert r.passed
    expected = [1 + 2 * np.exp(-1) * np.cos(2 * np.pi * k / 3) for k in range(3)]
    assert np.allclose(r.spectrum, expected)
    assert np.allclose(r.spectrum, [1.7358, 0.6321, 0.6321], atol=1e-4)
    bad = bochner_check(m, GeneratingState(m, np.array([1, np.e, np.e]), 1.0))
    assert not bad.passed and bad.spectrum.min() == pytest.approx(1 - np.e)
    one = bochner_check(m, GeneratingState(m, np.ones(3), 0.0))
    assert one.passed and np.allclose(one.spectrum, [3, 0, 0])


def test_bochner_needs_cyclic_group():
    with pytest.raises(ValueError):
        cyclic_order(MONOIDS["S3"])
    # Z2 written with letters still has a generator
    assert cyclic_order(MONOIDS["Z2"]) == [0, 1]


@pytest.mark.parametrize("n", [4, 5, 7])
def test_spectrum_matches_circulant_eigenvalues(n):
    from qlevy.builders import cyclic_group
    from qlevy.cumulant import state_matrix

    m = cyclic_group(n)
    rng = np.random.default_rng(n)
    l = random_functional(m, rng)
    vals = np.exp(l.values)
    assert np.allclose(np.sort(bochner_spectrum(m, vals)), np.linalg.eigvalsh(state_matrix(m, vals)), atol=1e-10)


def test_probe_examples():
    r = centered_probe(*z2_gamma(0.7), trials=1000, seed=0)
    assert r.passed and r.min_observed >= 0
    r = centered_probe(*z2_gamma(-0.3), trials=1000, seed=0)
    assert not r.passed and r.min_observed < 0
    m = MONOIDS["S3"]
    r = centered_probe(m, Cumulant(m, np.zeros(6)))
    assert r.passed and r.min_observed == 0.0


def test_probe_is_seeded():
    m, l = z2_gamma(0.7)
    assert centered_probe(m, l, seed=3) == centered_probe(m, l, seed=3)


def test_synth_examples():
    z3 = MONOIDS["Z3"]
    l = cumulant_from_rep(regular_representation(z3), np.array([1, 0, 0]))
    assert np.allclose(l.values, [0, -1, -1])
    b = MONOIDS["Bool"]
    proj = make_matrix_rep(b, {"u": np.eye(1), "p": np.zeros((1, 1))})
    assert np.allclose(cumulant_from_rep(proj, np.array([1.0])).values, [0, -1])
    assert not cumulant_from_rep(regular_representation(z3), np.zeros(3)).values.any()


def test_invalid_representation_is_rejected():
    b = MONOIDS["Bool"]
    with pytest.raises(OracleError, match="multiplicativity"):
        make_matrix_rep(b, {"u": np.eye(1), "p": 2 * np.eye(1)})
    # the regular representation of a non-group monoid is not a star-representation
    with pytest.raises(OracleError):
        cumulant_from_rep(regular_representation(b), np.ones(2))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["Z3", "Z5", "S3"]), st.integers(0, 2**31 - 1))
def test_synthesized_cumulants_are_valid(name, seed):
    m = MONOIDS[name]
    rep = regular_representation(m)
    rng = np.random.default_rng(seed)
    eta = rng.standard_normal(rep.dim) + 1j * rng.standard_normal(rep.dim)
    l = cumulant_from_rep(rep, eta)
    assert validate_cumulant(m, l).valid
    q = build_canonical_quadruple(m, l)
    T = m.table
    assert np.allclose(q.gram_products(), l.values[T] - l.values[:, None] - l.values[None, :], atol=1e-9)
    expect = [np.conj(eta) @ (rep.pi[b] - np.eye(rep.dim)) @ eta for b in range(len(m))]
    assert np.allclose(l.values, expect)
    assert centered_probe(m, l, trials=300, seed=seed).passed
