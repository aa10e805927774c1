from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlevy.io import InputError, load_monoid
from qlevy.monoid import (
    AlgebraVector,
    MonoidError,
    algebra_product,
    conv,
    delta,
    involute,
    star,
    star_identity_violation,
    validate_monoid,
)

from conftest import MONOIDS, monoid_and_vectors


def two_element(product, involution):
    return {"name": "T", "elements": ["u", "a"], "unit": "u", "product": product, "involution": involution}


def test_z2_and_boolean_are_valid():
    z = validate_monoid(two_element([["u", "a"], ["a", "u"]], {"u": "u", "a": "a"}))
    b = validate_monoid(two_element([["u", "a"], ["a", "a"]], {"u": "u", "a": "a"}))
    assert z.mul("a", "a") == "u"
    assert b.mul("a", "a") == "a"
    assert z.is_group() and not b.is_group()


def test_involution_must_have_order_two():
    with pytest.raises(MonoidError, match="order 2"):
        validate_monoid(two_element([["u", "a"], ["a", "a"]], {"u": "u", "a": "u"}))


def test_unit_and_antimultiplicativity_violations():
    with pytest.raises(MonoidError, match="unit violation"):
        validate_monoid(two_element([["a", "a"], ["a", "a"]], {"u": "u", "a": "a"}))
    # left-zero semigroup with unit adjoined: (a.b)* = a but b*.a* = b
    raw = {
        "name": "L",
        "elements": ["u", "a", "b"],
        "unit": "u",
        "product": [["u", "a", "b"], ["a", "a", "a"], ["b", "b", "b"]],
        "involution": {"u": "u", "a": "a", "b": "b"},
    }
    with pytest.raises(MonoidError, match="anti-multiplicative at \\(a, b\\)"):
        validate_monoid(raw)


def test_missing_entry_and_associativity_fixtures(cpath):
    with pytest.raises(InputError, match=r"missing product entry \(1, 2\)"):
        load_monoid(cpath("bad_missing_entry"))
    with pytest.raises(InputError, match=r"associativity violation at \(a, a, b\)"):
        load_monoid(cpath("bad_assoc"))


def test_diagnostics_list_every_missing_entry():
    raw = two_element([["u"], ["a"]], {"u": "u", "a": "a"})
    with pytest.raises(MonoidError) as exc:
        validate_monoid(raw)
    assert exc.value.diagnostics == ["missing product entry (u, a)", "missing product entry (a, a)"]


def test_star_examples():
    z3 = MONOIDS["Z3"]
    assert star(z3, "1", "2") == "2"
    for m in MONOIDS.values():
        for b in m.elements:
            assert star(m, b, m.unit) == b
            assert star(m, m.unit, b) == m.adjoint(b)
    with pytest.raises(KeyError, match="unknown element"):
        star(z3, "1", "7")


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_star_identities_hold_exhaustively(name):
    assert star_identity_violation(MONOIDS[name]) is None


def test_conv_examples():
    z2 = MONOIDS["Z2"]
    for m in MONOIDS.values():
        for a in m.elements:
            for c in m.elements:
                assert conv(m, delta(m, a), delta(m, c)).allclose(delta(m, star(m, a, c)))
    k = delta(z2, "a") + delta(z2, "u")
    assert conv(z2, k, delta(z2, "a")).allclose(delta(z2, "u") + delta(z2, "a"))


def test_involute_examples():
    z3 = MONOIDS["Z3"]
    assert involute(z3, 1j * delta(z3, "1")).allclose(-1j * delta(z3, "2"))
    for b in z3.elements:
        assert involute(z3, delta(z3, b)).allclose(delta(z3, z3.adjoint(b)))


def test_mismatched_monoids_are_rejected():
    with pytest.raises(ValueError):
        conv(MONOIDS["Z3"], delta(MONOIDS["Z3"], "1"), delta(MONOIDS["Z5"], "1"))
    with pytest.raises(ValueError, match="shape"):
        AlgebraVector(MONOIDS["Z3"], np.zeros(2))


@settings(max_examples=60, deadline=None)
@given(monoid_and_vectors(1))
def test_unit_delta_laws(mv):
    m, (c,) = mv
    k = AlgebraVector(m, c)
    du = delta(m, m.unit)
    assert conv(m, k, du).allclose(k)
    assert conv(m, du, k).allclose(involute(m, k))
    assert involute(m, involute(m, k)).allclose(k)


@settings(max_examples=60, deadline=None)
@given(monoid_and_vectors(2))
def test_conv_sum_law_and_ideal(mv):
    m, (c1, c2) = mv
    kp, k = AlgebraVector(m, c1), AlgebraVector(m, c2)
    assert np.isclose(conv(m, kp, k).minus, kp.minus * np.conj(k.minus), atol=1e-9)
    a = AlgebraVector(m, c1 - c1.mean())  # sum zero, so in the ideal
    assert a.in_ideal(1e-9)
    assert conv(m, a, k).in_ideal(1e-8) and conv(m, k, a).in_ideal(1e-8)
    assert np.isclose(k.plus, np.conj(k.minus))


@settings(max_examples=60, deadline=None)
@given(monoid_and_vectors(2), st.data())
def test_conv_right_associativity(mv, data):
    m, (c1, c2) = mv
    b = data.draw(st.sampled_from(m.elements))
    kp, k = AlgebraVector(m, c1), AlgebraVector(m, c2)
    lhs = conv(m, conv(m, kp, delta(m, m.adjoint(b))), k)
    rhs = conv(m, kp, conv(m, k, delta(m, b)))
    assert lhs.allclose(rhs, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(monoid_and_vectors(3))
def test_algebra_product_is_associative_and_star_antimultiplicative(mv):
    m, cs = mv
    x, y, z = (AlgebraVector(m, c) for c in cs)
    xy = algebra_product(m, x, y)
    assert algebra_product(m, xy, z).allclose(algebra_product(m, x, algebra_product(m, y, z)), atol=1e-8)
    assert involute(m, xy).allclose(algebra_product(m, involute(m, y), involute(m, x)), atol=1e-8)
