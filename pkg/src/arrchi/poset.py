"""Ground-truth characteristic polynomials for concrete dilations.

Everything here works on an explicit hyperplane list for one value of m
and stays deliberately simple: flats are canonical affine subspaces, the
intersection poset is built by incremental closure, and the Moebius
function is evaluated straight from its defining recursion.  A signed
subset sum (Whitney) and a finite-field point count give two further
routes to the same polynomial.  These are the checks the quasi-polynomial
engine is validated against, so none of them share its counting path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, lcm

import numpy as np

from .charpoly import ArrangementSpec, CharQuasiPoly, chi_at
from .errors import GuardExceeded, InvalidInput

WHITNEY_GUARD = 18
FIELD_BUDGET = 10**8


@dataclass(frozen=True)
class AffineFlat:
    """A nonempty affine subspace in canonical form.

    ``rows`` are the equations: integer vectors (a_1 .. a_d | rhs) in
    reduced row echelon form, each scaled primitive with positive pivot.
    The representation is unique, so flat equality is tuple equality.
    """

    ambient_dim: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.rows)

    @property
    def is_ambient(self) -> bool:
        return not self.rows

    @staticmethod
    def ambient(d: int) -> "AffineFlat":
        return AffineFlat(d, ())

    @staticmethod
    def hyperplane(coeffs, rhs: int) -> "AffineFlat":
        if all(x == 0 for x in coeffs):
            raise InvalidInput("hyperplane needs a nonzero normal")
        flat = AffineFlat.ambient(len(coeffs)).intersect_row(tuple(coeffs) + (rhs,))
        assert flat is not None
        return flat

    def intersect_row(self, aug_row) -> "AffineFlat | None":
        """Intersect with one equation; None when the result is empty."""
        d = self.ambient_dim
        residual = [Fraction(x) for x in aug_row]
        for row in self.rows:
            pivot = next(j for j in range(d) if row[j] != 0)
            f = residual[pivot] / row[pivot]
            if f:
                residual = [x - f * y for x, y in zip(residual, row)]
        if all(x == 0 for x in residual[:d]):
            return None if residual[d] != 0 else self
        system = [[Fraction(x) for x in row] for row in self.rows]
        system.append(residual)
        return AffineFlat(d, _canonical_rows(system, d))

    def intersect(self, other: "AffineFlat") -> "AffineFlat | None":
        flat = self
        for row in other.rows:
            flat = flat.intersect_row(row)
            if flat is None:
                return None
        return flat

    def contains(self, other: "AffineFlat") -> bool:
        """Whether self (as a point set) contains other."""
        d = self.ambient_dim
        for row in self.rows:
            residual = [Fraction(x) for x in row]
            for orow in other.rows:
                pivot = next(j for j in range(d) if orow[j] != 0)
                f = residual[pivot] / orow[pivot]
                if f:
                    residual = [x - f * y for x, y in zip(residual, orow)]
            if any(x != 0 for x in residual):
                return False
        return True


def _canonical_rows(system, d: int) -> tuple[tuple[int, ...], ...]:
    """RREF the augmented system and scale rows integer-primitive."""
    rows = [list(r) for r in system]
    pivots = []
    r = 0
    for c in range(d):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    out = []
    for i in range(r):
        denom = lcm(*(x.denominator for x in rows[i]))
        ints = [int(x * denom) for x in rows[i]]
        g = gcd(*ints)
        if g:
            ints = [x // g for x in ints]
        out.append(tuple(ints))
    return tuple(out)


def build_hyperplanes(spec: ArrangementSpec, m: int) -> list[AffineFlat]:
    """The n*(2m+1) hyperplanes alpha(x) = k, k in [-m, m], as a list.

    Proportional forms with compatible levels give duplicate flats; the
    duplicates are kept because the Whitney sum runs over the list.
    """
    if m < 0:
        raise InvalidInput("m must be >= 0")
    return [
        AffineFlat.hyperplane(row, k)
        for row in spec.forms
        for k in range(-m, m + 1)
    ]


@dataclass(frozen=True)
class IntersectionPoset:
    """All nonempty intersections, ordered by reverse inclusion.

    ``flats`` starts with the ambient space (the bottom element) and is
    sorted by decreasing dimension; ``mobius`` holds the Moebius value of
    each flat, and ``containment_masks`` records which hyperplanes of the
    defining list pass through each flat.
    """

    ambient_dim: int
    flats: tuple[AffineFlat, ...]
    mobius: tuple[int, ...]
    containment_masks: tuple[int, ...]


def intersection_poset(hyperplanes, d: int) -> IntersectionPoset:
    flats: dict[AffineFlat, None] = {AffineFlat.ambient(d): None}
    for h in hyperplanes:
        new = []
        for f in flats:
            g = f.intersect(h)
            if g is not None:
                new.append(g)
        for g in new:
            flats[g] = None

    ordered = sorted(flats, key=lambda f: (-f.dim, f.rows))
    # For flats x, y:  y contains x  iff  {h : y <= h} is a subset of
    # {h : x <= h}, because every flat equals the intersection of the
    # hyperplanes through it.  Bitmasks make that test cheap.
    masks = []
    for f in ordered:
        mask = 0
        for bit, h in enumerate(hyperplanes):
            if h.contains(f):
                mask |= 1 << bit
        masks.append(mask)

    mobius = [0] * len(ordered)
    for i, f in enumerate(ordered):
        if f.is_ambient:
            mobius[i] = 1
            continue
        acc = 0
        for j in range(i):
            if ordered[j].dim > f.dim and masks[j] & masks[i] == masks[j]:
                acc += mobius[j]
            elif ordered[j].dim == f.dim:
                break
        mobius[i] = -acc
    return IntersectionPoset(d, tuple(ordered), tuple(mobius), tuple(masks))


def mobius_chi(poset: IntersectionPoset) -> tuple[int, ...]:
    """Characteristic polynomial via the Moebius sum, ascending in q."""
    coeffs = [0] * (poset.ambient_dim + 1)
    for flat, mu in zip(poset.flats, poset.mobius):
        coeffs[flat.dim] += mu
    return tuple(coeffs)


def whitney_chi(
    hyperplanes, d: int, *, guard: int = WHITNEY_GUARD, force: bool = False
) -> tuple[int, ...]:
    """Characteristic polynomial as the signed sum over subcollections
    with nonempty intersection.

    Exponential in the list length; branches whose partial intersection
    is already empty are pruned, since every extension stays empty.
    """
    n = len(hyperplanes)
    if n > guard and not force:
        raise GuardExceeded(
            f"Whitney sum over 2^{n} subcollections needs force=True"
        )
    coeffs = [0] * (d + 1)

    def walk(i: int, flat: AffineFlat, size: int) -> None:
        if i == n:
            coeffs[flat.dim] += -1 if size % 2 else 1
            return
        walk(i + 1, flat, size)
        g = flat.intersect(hyperplanes[i])
        if g is not None:
            walk(i + 1, g, size + 1)

    walk(0, AffineFlat.ambient(d), 0)
    return tuple(coeffs)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class FiniteFieldReport:
    prime: int
    m: int
    count: int
    chi_value: int
    matches: bool


def finite_field_count(
    spec: ArrangementSpec,
    m: int,
    p: int,
    *,
    cq: CharQuasiPoly | None = None,
    budget: int = FIELD_BUDGET,
) -> FiniteFieldReport:
    """Count points of (Z/p)^d avoiding every hyperplane mod p.

    For large enough p the count equals chi(p, m); no threshold theorem is
    assumed here, so the report only states whether the engine value was
    matched.  A mismatch is a diagnostic (p may simply be too small), not
    an error.
    """
    if not _is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if m < 0:
        raise InvalidInput("m must be >= 0")
    d = spec.dimension
    if p**d > budget:
        raise GuardExceeded(f"{p}^{d} points exceed the budget {budget}")
    forbidden = np.zeros(p, dtype=bool)
    for k in range(-m, m + 1):
        forbidden[k % p] = True
    forms = np.array(spec.forms, dtype=np.int64) % p
    count = 0
    for x in product(range(p), repeat=d):
        values = forms @ np.array(x, dtype=np.int64) % p
        if not forbidden[values].any():
            count += 1
    coeffs = chi_at(spec, m, cq=cq)
    chi_value = sum(int(c) * p**i for i, c in enumerate(coeffs))
    return FiniteFieldReport(p, m, count, chi_value, count == chi_value)
