"""Exact characteristic quasi-polynomials of deformed hyperplane arrangements.

Given a multiset of integer linear forms on Q^d, the package computes the
characteristic polynomial of the arrangement  alpha(x) = k, |k| <= m  as
an explicit polynomial in q whose coefficients are quasi-polynomials in m,
derives region and bounded-region counts, and cross-checks reciprocity and
volume identities against independent brute-force computations.
"""

from .charpoly import (
    ArrangementSpec,
    CharQuasiPoly,
    bounded_regions,
    characteristic_quasipoly,
    check_reciprocity,
    check_special_reciprocity,
    chi_at,
    corollary1_leading,
    random_arrangement,
    regions,
    sign_scan,
)
from .ehrhart import (
    SubsetGeometry,
    count_interior_points,
    count_points,
    count_points_bruteforce,
    ehrhart_quasipoly,
    normalized_volume,
    verify_ehrhart_reciprocity,
)
from .errors import (
    ArrchiError,
    GuardExceeded,
    InconsistentSamples,
    InvalidInput,
    InvariantViolation,
    PeriodNotFound,
)
from .linalg import (
    LatticeBasis,
    is_consistent,
    is_totally_unimodular,
    rref,
    saturated_lattice_basis,
    smith_normal_form,
)
from .poset import (
    AffineFlat,
    IntersectionPoset,
    build_hyperplanes,
    finite_field_count,
    intersection_poset,
    mobius_chi,
    whitney_chi,
)
from .quasipoly import (
    QuasiPolynomial,
    equals,
    fit,
    linear_combine,
    minimal_period_fit,
    precompose_affine,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
