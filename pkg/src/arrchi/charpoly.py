"""Characteristic quasi-polynomials of deformed arrangements.

Input: a multiset A of nonzero integer linear forms on Q^d spanning the
dual space, given as the rows of an n x d matrix.  For an integer m >= 0
the arrangement consists of the hyperplanes  alpha(x) = k  for alpha in A
and k in [-m, m].  Its characteristic polynomial

    chi(q, m) = sum_i  c_i(m) q^i

is assembled by inclusion-exclusion over the 2^n row subsets F: a subset
of rank d - i contributes (-1)^{#F} times its dilate-count
quasi-polynomial to c_i.  Duplicate rows give distinct subsets, which is
what makes the multiset semantics come out right.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import ehrhart
from .errors import GuardExceeded, InvalidInput, InvariantViolation
from .linalg import IntMatrix, as_int_matrix, rank
from .quasipoly import (
    QuasiPolynomial,
    equals,
    linear_combine,
    precompose_affine,
    scale,
)

SUBSET_GUARD = 20


@dataclass(frozen=True)
class ArrangementSpec:
    """A multiset of integer forms spanning (Q^d)*, plus a display label."""

    dimension: int
    forms: IntMatrix
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "forms", as_int_matrix(self.forms))
        if self.dimension < 1:
            raise InvalidInput("dimension must be >= 1")
        for i, row in enumerate(self.forms):
            if len(row) != self.dimension:
                raise InvalidInput(
                    f"form {i} has {len(row)} entries, expected {self.dimension}"
                )
            if all(x == 0 for x in row):
                raise InvalidInput(f"form {i} is zero")
        if rank(self.forms) != self.dimension:
            raise InvalidInput(
                "forms do not span the dual space "
                f"(rank {rank(self.forms)} < dimension {self.dimension})"
            )

    @property
    def size(self) -> int:
        return len(self.forms)


@dataclass(frozen=True)
class CharQuasiPoly:
    """chi(q, m) as a list of coefficient quasi-polynomials c_0 .. c_d."""

    dimension: int
    coefficients: tuple[QuasiPolynomial, ...]

    def __post_init__(self):
        d = self.dimension
        if len(self.coefficients) != d + 1:
            raise InvalidInput("need exactly dimension + 1 coefficients")
        for i, c in enumerate(self.coefficients):
            if c.degree > d - i:
                raise InvariantViolation(
                    f"coefficient of q^{i} has degree {c.degree} > {d - i}"
                )
        if self.coefficients[0].degree != d:
            raise InvariantViolation("constant coefficient must have full degree")
        if not equals(self.coefficients[d], QuasiPolynomial.constant(1)):
            raise InvariantViolation("top coefficient must be the constant 1")

    def coefficients_at(self, m: int) -> tuple[Fraction, ...]:
        """The polynomial in q at a concrete m, as an ascending vector."""
        return tuple(c.evaluate(m) for c in self.coefficients)

    def equals(self, other: "CharQuasiPoly") -> bool:
        return self.dimension == other.dimension and all(
            equals(a, b) for a, b in zip(self.coefficients, other.coefficients)
        )


def _gray_masks(n: int):
    for i in range(1 << n):
        yield i ^ (i >> 1)


def _mask_rows(forms: IntMatrix, mask: int) -> tuple:
    return tuple(forms[i] for i in range(len(forms)) if mask >> i & 1)


def _geometries_by_subset(forms: IntMatrix):
    """One SubsetGeometry per row subset, instances shared per lattice key."""
    by_key: dict[tuple, ehrhart.SubsetGeometry] = {}
    out = []
    for mask in _gray_masks(len(forms)):
        geom = ehrhart.SubsetGeometry(_mask_rows(forms, mask))
        geom = by_key.setdefault(geom.key, geom)
        out.append((mask, geom))
    return out


def _fit_worker(geom: ehrhart.SubsetGeometry):
    return geom.key, ehrhart.ehrhart_quasipoly(geom)


def _fit_all(geoms, threads: int) -> None:
    """Populate the Ehrhart cache for the distinct geometries."""
    unique = {g.key: g for _, g in geoms}
    pending = [g for key, g in unique.items() if key not in ehrhart._QP_CACHE]
    if threads > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for key, qp in pool.map(_fit_worker, pending):
                ehrhart._QP_CACHE.setdefault(key, qp)
    else:
        for g in pending:
            ehrhart.ehrhart_quasipoly(g)


def characteristic_quasipoly(
    spec: ArrangementSpec,
    *,
    threads: int = 1,
    subset_guard: int = SUBSET_GUARD,
    force: bool = False,
) -> CharQuasiPoly:
    """Assemble chi(q, m) for a deformed arrangement.

    Enumerates all row subsets (2^n of them, guarded), fits each distinct
    value lattice once, and combines the terms exactly.  With threads > 1
    the distinct fits run in a process pool; the reduction order is fixed,
    so results are deterministic either way.
    """
    n = spec.size
    if n > subset_guard and not force:
        raise GuardExceeded(
            f"{n} forms means 2^{n} subsets; pass force=True to proceed"
        )
    geoms = _geometries_by_subset(spec.forms)
    _fit_all(geoms, threads)
    d = spec.dimension
    terms: list[list] = [[] for _ in range(d + 1)]
    for mask, geom in geoms:
        sign = -1 if bin(mask).count("1") % 2 else 1
        terms[d - geom.rank].append((sign, ehrhart.ehrhart_quasipoly(geom)))
    coefficients = tuple(linear_combine(ts) for ts in terms)
    return CharQuasiPoly(d, coefficients)


def chi_at(spec: ArrangementSpec, m: int, *, cq: CharQuasiPoly | None = None):
    """Coefficient vector of chi(q, m) at a concrete dilation m >= 0."""
    if m < 0:
        raise InvalidInput("chi_at needs m >= 0")
    if cq is None:
        cq = characteristic_quasipoly(spec)
    return cq.coefficients_at(m)


def regions(cq: CharQuasiPoly) -> QuasiPolynomial:
    """Region count (-1)^d chi(-1, m) as a quasi-polynomial."""
    d = cq.dimension
    out = linear_combine(
        ((-1) ** (d - i), c) for i, c in enumerate(cq.coefficients)
    )
    if out.degree != d:
        raise InvariantViolation("region count must have full degree")
    return out


def bounded_regions(cq: CharQuasiPoly) -> QuasiPolynomial:
    """Bounded-region count (-1)^d chi(1, m) as a quasi-polynomial."""
    sign = (-1) ** cq.dimension
    return linear_combine((sign, c) for c in cq.coefficients)


def check_reciprocity(cq: CharQuasiPoly) -> bool:
    """Coefficientwise reciprocity: c_i(-m) = (-1)^{d-i} c_i(m-1) for all i."""
    d = cq.dimension
    for i, c in enumerate(cq.coefficients):
        lhs = precompose_affine(c, -1, 0)
        rhs = scale((-1) ** (d - i), precompose_affine(c, 1, -1))
        if not equals(lhs, rhs):
            return False
    return True


def check_special_reciprocity(
    spec: ArrangementSpec, *, cq: CharQuasiPoly | None = None
) -> bool:
    """chi(q, -1) against the central arrangement: c_i(-1) = (-1)^{d-i} c_i(0)."""
    if cq is None:
        cq = characteristic_quasipoly(spec)
    d = cq.dimension
    return all(
        c.evaluate(-1) == (-1) ** (d - i) * c.evaluate(0)
        for i, c in enumerate(cq.coefficients)
    )


def corollary1_leading(
    spec: ArrangementSpec, *, cq: CharQuasiPoly | None = None
) -> Fraction:
    """Signed volume sum over full-rank subsets = leading region coefficient.

    Computes  sum_F (-1)^{#F - d} vol(P_F)  over subsets of rank d and
    asserts exact equality with the leading coefficient of the region
    quasi-polynomial before returning it.
    """
    d = spec.dimension
    total = Fraction(0)
    for mask, geom in _geometries_by_subset(spec.forms):
        if geom.rank != d:
            continue
        sign = (-1) ** (bin(mask).count("1") - d)
        total += sign * ehrhart.normalized_volume(geom)
    if cq is None:
        cq = characteristic_quasipoly(spec)
    reg = regions(cq)
    leads = set(reg.leading_coefficients(d))
    if leads != {total}:
        raise InvariantViolation(
            f"volume sum {total} does not match region leading coefficients {leads}"
        )
    return total


@dataclass(frozen=True)
class SignScanReport:
    """Observed sign behaviour of the alternating-normalized coefficients.

    ``values_positive`` asserts (-1)^{d-i} c_i(m) > 0 over the window (a
    theorem).  Negative constituent coefficients of those normalized
    quasi-polynomials are only reported: whether any exist in general is
    an open question, so nothing asserts on them.
    """

    window: int
    values_positive: bool
    negative_values: tuple[tuple[int, int], ...]  # (i, m) violations
    negative_coefficients: tuple[tuple[int, int, int], ...]  # (i, residue, power)


def sign_scan(cq: CharQuasiPoly, window: int) -> SignScanReport:
    d = cq.dimension
    bad_values = []
    bad_coeffs = []
    for i, c in enumerate(cq.coefficients):
        normalized = scale((-1) ** (d - i), c)
        for m in range(window + 1):
            if normalized.evaluate(m) <= 0:
                bad_values.append((i, m))
        for j, cons in enumerate(normalized.constituents):
            for power, coeff in enumerate(cons):
                if coeff < 0:
                    bad_coeffs.append((i, j, power))
    return SignScanReport(
        window=window,
        values_positive=not bad_values,
        negative_values=tuple(bad_values),
        negative_coefficients=tuple(bad_coeffs),
    )


def random_arrangement(n: int, d: int, seed: int) -> ArrangementSpec:
    """Seeded random spec with entries in [-3, 3], nonzero rows, full rank."""
    rng = random.Random(seed)
    while True:
        forms = []
        while len(forms) < n:
            row = tuple(rng.randint(-3, 3) for _ in range(d))
            if any(row):
                forms.append(row)
        if rank(tuple(forms)) == d:
            return ArrangementSpec(d, tuple(forms), label=f"random(n={n},d={d},seed={seed})")
