"""Finite star-monoid cumulants, their triangular representations and checks."""

from .builders import boolean_filter, cyclic_group, symmetric_group, z2
from .cumulant import (
    Cumulant,
    CumulantError,
    GeneratingState,
    check_positive_definite,
    generating_state,
    reduced_gram,
    validate_cumulant,
)
from .gns import (
    CanonicalQuadruple,
    MinkowskiRep,
    RepresentationError,
    assemble_minkowski,
    build_canonical_quadruple,
    minkowski_adjoint,
    polynorm,
    verify_representation,
)
from .monoid import AlgebraVector, MonoidError, StarMonoid, conv, delta, involute, star, validate_monoid
from .report import CheckEntry, RunReport
from .symmetry import CovarianceError, EndomorphismAction, build_covariance, check_homogeneity, validate_action

__version__ = "0.1.0"
