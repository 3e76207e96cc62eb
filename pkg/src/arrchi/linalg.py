"""Exact integer/rational linear algebra.

Matrices are immutable tuples of row tuples.  Integer matrices hold Python
ints (arbitrary precision); rational matrices hold ``fractions.Fraction``.
``Fraction`` already guarantees the canonical form we need for scalars
(reduced, positive denominator, 0/1 for zero), so no separate rational
type is defined.

The module is total and side-effect free: every function returns fresh
values and raises only on malformed input or an explicit size guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

from .errors import GuardExceeded, InvalidInput

IntMatrix = tuple[tuple[int, ...], ...]
QMatrix = tuple[tuple[Fraction, ...], ...]


def as_int_matrix(rows, width: int | None = None) -> IntMatrix:
    """Validate and freeze an integer matrix given as an iterable of rows."""
    frozen = tuple(tuple(int(x) for x in row) for row in rows)
    if frozen:
        w = len(frozen[0])
        for i, row in enumerate(frozen):
            if len(row) != w:
                raise InvalidInput(f"row {i} has length {len(row)}, expected {w}")
        if width is not None and w != width:
            raise InvalidInput(f"matrix width {w}, expected {width}")
    return frozen


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    if not m:
        return ()
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0])))


def mat_mul(a, b):
    """Exact matrix product; works for int and Fraction entries alike."""
    if a and b and len(a[0]) != len(b):
        raise InvalidInput("inner dimensions do not match")
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(m, v):
    if m and len(m[0]) != len(v):
        raise InvalidInput("matrix/vector dimensions do not match")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


# ---------------------------------------------------------------------------
# Row reduction over Q
# ---------------------------------------------------------------------------

def rref(m) -> tuple[QMatrix, tuple[int, ...], int]:
    """Reduced row echelon form over the rationals.

    Returns ``(reduced, pivot_columns, rank)``.  The reduced matrix is the
    unique RREF of the input; the function is total (any shape, any rank).
    """
    rows = [[Fraction(x) for x in row] for row in m]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows), tuple(pivots), r


def rank(m) -> int:
    return rref(m)[2]


def is_consistent(m: IntMatrix, b) -> bool:
    """Whether the linear system ``m @ x = b`` has a rational solution.

    Equivalent to rank([m | b]) == rank(m).  Raises on a length mismatch
    between ``b`` and the row count of ``m``.
    """
    if len(b) != len(m):
        raise InvalidInput(f"rhs length {len(b)} does not match {len(m)} rows")
    augmented = tuple(row + (bi,) for row, bi in zip(m, b))
    _, pivots, _ = rref(augmented)
    width = len(m[0]) if m else 0
    return width not in pivots


def solve(m, b):
    """One exact solution of ``m @ x = b`` via back-substitution, or None.

    Free variables are set to zero.  Used as an independent witness for
    :func:`is_consistent` in tests.
    """
    if len(b) != len(m):
        raise InvalidInput("dimension mismatch")
    width = len(m[0]) if m else 0
    augmented = tuple(tuple(row) + (bi,) for row, bi in zip(m, b))
    reduced, pivots, _ = rref(augmented)
    if width in pivots:
        return None
    x = [Fraction(0)] * width
    for i, p in enumerate(pivots):
        x[p] = reduced[i][width]
    return tuple(x)


def _primitive(vec) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector (gcd 1).

    The sign convention makes the first nonzero entry positive.
    """
    fracs = [Fraction(x) for x in vec]
    denom = lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * denom) for f in fracs]
    g = gcd(*ints) if ints else 0
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def kernel_basis(m) -> IntMatrix:
    """Primitive integer rows spanning the rational right kernel of ``m``.

    The rows span {x : m @ x = 0} over Q; they need not generate the full
    integer kernel lattice (see :func:`integer_kernel_basis` for that).
    """
    ncols = len(m[0]) if m else 0
    reduced, pivots, _ = rref(m)
    pivot_set = set(pivots)
    out = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -reduced[i][free]
        out.append(_primitive(v))
    return tuple(out)


# ---------------------------------------------------------------------------
# Integer normal forms
# ---------------------------------------------------------------------------

def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``(u, d, v)`` with ``d = u @ m @ v``.

    ``u`` and ``v`` are unimodular; ``d`` is diagonal with nonnegative
    entries satisfying d[0] | d[1] | ... .
    """
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    d = [list(row) for row in m]
    u = [list(row) for row in identity_matrix(nrows)]
    v = [list(row) for row in identity_matrix(ncols)]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def row_addmul(i, j, q):
        d[i] = [x + q * y for x, y in zip(d[i], d[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def col_swap(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def col_addmul(i, j, q):
        for row in d:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    t = 0
    while t < min(nrows, ncols):
        # pick the smallest nonzero entry of the trailing block as pivot
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        while True:
            restarted = False
            for i in range(t + 1, nrows):
                if d[i][t] == 0:
                    continue
                q = d[i][t] // d[t][t]
                row_addmul(i, t, -q)
                if d[i][t] != 0:  # remainder beats the pivot; promote it
                    row_swap(t, i)
                    restarted = True
                    break
            if restarted:
                continue
            for j in range(t + 1, ncols):
                if d[t][j] == 0:
                    continue
                q = d[t][j] // d[t][t]
                col_addmul(j, t, -q)
                if d[t][j] != 0:
                    col_swap(t, j)
                    restarted = True
                    break
            if restarted:
                continue
            # row t and column t are clear; enforce divisibility of the rest
            offender = None
            for i in range(t + 1, nrows):
                for j in range(t + 1, ncols):
                    if d[i][j] % d[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(t, offender, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    freeze = lambda rows: tuple(tuple(r) for r in rows)
    return freeze(u), freeze(d), freeze(v)


def elementary_divisors(m: IntMatrix) -> tuple[int, ...]:
    _, d, _ = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    return tuple(x for x in diag if x != 0)


def integer_kernel_basis(m: IntMatrix, ncols: int) -> IntMatrix:
    """Basis (as rows) of the full integer kernel lattice {x in Z^ncols : m @ x = 0}.

    The returned lattice is saturated by construction.  ``ncols`` must be
    passed explicitly so the zero-row case keeps its ambient dimension.
    """
    if not m:
        return identity_matrix(ncols)
    _, d, v = smith_normal_form(m)
    zero_cols = [
        j for j in range(ncols)
        if j >= len(m) or d[j][j] == 0
    ]
    return tuple(tuple(v[i][j] for i in range(ncols)) for j in zero_cols)


def hermite_normal_form(rows: IntMatrix) -> IntMatrix:
    """Canonical row-style Hermite normal form of the lattice spanned by ``rows``.

    Echelon shape, positive pivots, entries above each pivot reduced into
    [0, pivot).  Two row sets span the same lattice iff their HNFs match,
    which is what the Ehrhart cache keys rely on.
    """
    work = [list(r) for r in rows]
    ncols = len(work[0]) if work else 0
    pivot_row = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(pivot_row, len(work)) if work[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(work[i][col]))
            work[pivot_row], work[i0] = work[i0], work[pivot_row]
            done = True
            for i in range(pivot_row + 1, len(work)):
                if work[i][col] != 0:
                    q = work[i][col] // work[pivot_row][col]
                    work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
                    if work[i][col] != 0:
                        done = False
            if done:
                break
        if pivot_row < len(work) and work[pivot_row][col] != 0:
            if work[pivot_row][col] < 0:
                work[pivot_row] = [-x for x in work[pivot_row]]
            p = work[pivot_row][col]
            for i in range(pivot_row):
                q = work[i][col] // p
                if q:
                    work[i] = [x - q * y for x, y in zip(work[i], work[pivot_row])]
            pivot_row += 1
    return tuple(tuple(r) for r in work[:pivot_row])


def det(m: IntMatrix) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise InvalidInput("determinant needs a square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def nonzero_minors(m: IntMatrix, size: int):
    """Yield the absolute values of all nonzero size x size minors."""
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    for rows_idx in combinations(range(nrows), size):
        for cols_idx in combinations(range(ncols), size):
            sub = tuple(tuple(m[i][j] for j in cols_idx) for i in rows_idx)
            value = det(sub)
            if value:
                yield abs(value)


TU_GUARD = 12


def is_totally_unimodular(m: IntMatrix, *, force: bool = False) -> bool:
    """Whether every square minor of ``m`` lies in {-1, 0, 1}.

    Brute enumeration of all minors: exponential, intended for small
    matrices.  Refuses anything larger than 12 x 12 unless ``force``.
    """
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    if (nrows > TU_GUARD or ncols > TU_GUARD) and not force:
        raise GuardExceeded(
            f"total unimodularity test on a {nrows}x{ncols} matrix needs force=True"
        )
    if any(abs(x) > 1 for row in m for x in row):
        return False
    for size in range(2, min(nrows, ncols) + 1):
        for rows_idx in combinations(range(nrows), size):
            sub_rows = tuple(m[i] for i in rows_idx)
            for cols_idx in combinations(range(ncols), size):
                sub = tuple(tuple(row[j] for j in cols_idx) for row in sub_rows)
                if abs(det(sub)) > 1:
                    return False
    return True


# ---------------------------------------------------------------------------
# Saturated lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeBasis:
    """Basis of a saturated sublattice of Z^ambient_dim.

    ``basis`` is an ambient_dim x rank matrix whose columns are the basis
    vectors.  Saturation means the lattice equals (Q-span of columns) n Z^n;
    equivalently all elementary divisors of ``basis`` are 1.
    """

    ambient_dim: int
    rank: int
    basis: IntMatrix

    def __post_init__(self):
        if len(self.basis) != self.ambient_dim:
            raise InvalidInput("basis row count must equal the ambient dimension")
        if self.basis and len(self.basis[0]) != self.rank:
            raise InvalidInput("basis column count must equal the rank")

    def columns(self) -> IntMatrix:
        return transpose(self.basis)

    def canonical_key(self) -> tuple:
        """Hashable canonical form of the lattice (ambient dim + HNF rows)."""
        return (self.ambient_dim, hermite_normal_form(self.columns()))


def saturated_lattice_basis(a: IntMatrix) -> LatticeBasis:
    """Basis of Z^n n colspace_Q(a) for an n x d integer matrix ``a``.

    Computed by finding integer rows c with c @ a = 0 spanning the left
    kernel over Q, then taking the integer kernel of that system; the
    result is saturated automatically.
    """
    n = len(a)
    if n == 0:
        return LatticeBasis(0, 0, ())
    cokernel = kernel_basis(transpose(a))
    if not cokernel:
        return LatticeBasis(n, n, identity_matrix(n))
    basis_rows = integer_kernel_basis(cokernel, n)
    r = len(basis_rows)
    basis = transpose(basis_rows) if basis_rows else tuple(() for _ in range(n))
    return LatticeBasis(n, r, basis)
