from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from qlevy.acceptance import corpus_path, load_pair
from qlevy.builders import boolean_filter, cyclic_group, symmetric_group, z2
from qlevy.cumulant import Cumulant
from qlevy.io import load_monoid

MONOIDS = {
    "Z2": z2(),
    "Z3": cyclic_group(3),
    "Z4": cyclic_group(4),
    "Z5": cyclic_group(5),
    "S3": symmetric_group(3),
    "Bool": boolean_filter(),
}


@pytest.fixture
def corpus():
    """Load (monoid, functional) pairs from the bundled corpus by file stem."""
    return load_pair


@pytest.fixture
def cpath():
    return corpus_path


def monoid(name):
    return MONOIDS[name]


def cumulant(m, values, name="l"):
    return Cumulant.from_dict(m, {m.unit: 0.0, **values}, name)


def z2_gamma(gamma):
    m = MONOIDS["Z2"]
    return m, cumulant(m, {"a": -gamma})


coef = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@st.composite
def monoid_and_vectors(draw, count=2):
    m = MONOIDS[draw(st.sampled_from(sorted(MONOIDS)))]
    vecs = [np.array(draw(st.lists(coef, min_size=len(m), max_size=len(m)))) for _ in range(count)]
    return m, vecs


__all__ = ["MONOIDS", "monoid", "cumulant", "z2_gamma", "monoid_and_vectors", "load_monoid"]
