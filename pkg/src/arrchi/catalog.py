"""Built-in arrangement families and their closed-form identities.

Covers the two small worked examples, crystallographic root systems of
types A, B, C, D and G2 (with their Catalan-style deformations and the
product formula for chi), Fuss-Catalan numbers, graphical arrangements,
and the signed-volume identity for type A.

Root realizations are chosen with integer coordinates matching the
coroot-lattice arithmetic, not just the matroid: type C gets the forms
2x_i where type B has x_i, exactly the distinction that makes the counts
of proportional forms differ.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from . import ehrhart
from .charpoly import (
    ArrangementSpec,
    CharQuasiPoly,
    characteristic_quasipoly,
    regions,
)
from .errors import GuardExceeded, InvalidInput, InvariantViolation
from .linalg import IntMatrix, is_totally_unimodular, rank
from .polys import Poly, add as poly_add, mul as poly_mul
from .quasipoly import QuasiPolynomial


def example_two_forms() -> ArrangementSpec:
    """The one-dimensional multiset {x, 2x}."""
    return ArrangementSpec(1, ((1,), (2,)), label="ex1")


def coordinate_arrangement(d: int) -> ArrangementSpec:
    """The coordinate forms x_1 .. x_d."""
    if d < 1:
        raise InvalidInput("d must be >= 1")
    forms = tuple(tuple(1 if j == i else 0 for j in range(d)) for i in range(d))
    return ArrangementSpec(d, forms, label=f"coord:{d}")


# ---------------------------------------------------------------------------
# Root systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootSystemData:
    type_label: str
    rank: int
    positive_roots: IntMatrix
    exponents: tuple[int, ...]
    coxeter_number: int
    weyl_order: int

    def __post_init__(self):
        d, h = self.rank, self.coxeter_number
        if len(self.positive_roots) != d * h // 2:
            raise InvariantViolation("positive root count must be rank*h/2")
        if sum(self.exponents) != d * h // 2:
            raise InvariantViolation("exponents must sum to the root count")
        if sorted(h - e for e in self.exponents) != sorted(self.exponents):
            raise InvariantViolation("h - e_i must permute the exponents")
        if self.exponents != tuple(sorted(self.exponents)):
            raise InvariantViolation("exponents must be sorted ascending")

    @property
    def name(self) -> str:
        return f"{self.type_label}{self.rank}"


def _units(d: int, i: int, j: int | None = None, si: int = 1, sj: int = 1):
    row = [0] * d
    row[i] = si
    if j is not None:
        row[j] = sj
    return tuple(row)


def root_system(type_label: str, rnk: int) -> RootSystemData:
    """Integer realization plus the classical invariants of one type.

    Type A_d uses the forms x_i and x_i - x_j (the coordinates where the
    last simple direction is set to zero), so its form matrix is exactly
    the graphical matrix of the complete graph grounded at one vertex.
    D_3 is accepted and coincides with A_3 up to relabeling.
    """
    t = type_label.upper()
    if t == "A":
        if rnk < 1:
            raise InvalidInput("type A needs rank >= 1")
        roots = [_units(rnk, i) for i in range(rnk)]
        roots += [_units(rnk, i, j, 1, -1) for i, j in combinations(range(rnk), 2)]
        return RootSystemData(
            "A", rnk, tuple(roots),
            tuple(range(1, rnk + 1)), rnk + 1, factorial(rnk + 1),
        )
    if t in ("B", "C"):
        if rnk < 2:
            raise InvalidInput(f"type {t} needs rank >= 2")
        scale = 2 if t == "C" else 1
        roots = [_units(rnk, i, si=scale) for i in range(rnk)]
        roots += [_units(rnk, i, j, 1, -1) for i, j in combinations(range(rnk), 2)]
        roots += [_units(rnk, i, j, 1, 1) for i, j in combinations(range(rnk), 2)]
        return RootSystemData(
            t, rnk, tuple(roots),
            tuple(range(1, 2 * rnk, 2)), 2 * rnk, 2**rnk * factorial(rnk),
        )
    if t == "D":
        if rnk < 3:
            raise InvalidInput("type D needs rank >= 3 (D3 = A3)")
        roots = [_units(rnk, i, j, 1, -1) for i, j in combinations(range(rnk), 2)]
        roots += [_units(rnk, i, j, 1, 1) for i, j in combinations(range(rnk), 2)]
        exps = tuple(sorted(list(range(1, 2 * rnk - 2, 2)) + [rnk - 1]))
        return RootSystemData(
            "D", rnk, tuple(roots), exps, 2 * rnk - 2, 2 ** (rnk - 1) * factorial(rnk)
        )
    if t == "G":
        if rnk != 2:
            raise InvalidInput("type G only exists in rank 2")
        roots = ((1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2))
        return RootSystemData("G", 2, roots, (1, 5), 6, 12)
    raise InvalidInput(f"unsupported root system type {type_label!r}")


def catalan_arrangement(rsd: RootSystemData) -> ArrangementSpec:
    """The deformed reflection arrangement of the root system."""
    return ArrangementSpec(rsd.rank, rsd.positive_roots, label=f"root:{rsd.name}")


def catalan_product_formula(rsd: RootSystemData) -> CharQuasiPoly:
    """chi(q, m) = product_i (q - m*h - e_i), expanded exactly."""
    h = rsd.coxeter_number
    # coefficients of q^k are polynomials in m, ascending in both variables
    qpoly: list[Poly] = [(Fraction(1),)]
    for e in rsd.exponents:
        linear: Poly = (Fraction(-e), Fraction(-h))  # -(m*h + e)
        new: list[Poly] = [()] * (len(qpoly) + 1)
        for k, cm in enumerate(qpoly):
            new[k + 1] = poly_add(new[k + 1], cm)
            new[k] = poly_add(new[k], poly_mul(linear, cm))
        qpoly = new
    coefficients = tuple(QuasiPolynomial.from_poly(cm) for cm in qpoly)
    return CharQuasiPoly(rsd.rank, coefficients)


def fuss_catalan(rsd: RootSystemData, m: int) -> tuple[int, int]:
    """Deformation Catalan numbers (N, N+) at level m.

    N = prod
    (m*h + e_i + 1) / |W| counts Weyl orbits of regions, N+ the
    bounded ones; both are asserted to be integers.
    """
    if m < 0:
        raise InvalidInput("m must be >= 0")
    h, w = rsd.coxeter_number, rsd.weyl_order
    n_val = Fraction(1)
    n_plus = Fraction(1)
    for e in rsd.exponents:
        n_val *= m * h + e + 1
        n_plus *= m * h + e - 1
    n_val /= w
    n_plus /= w
    if n_val.denominator != 1 or n_plus.denominator != 1:
        raise InvariantViolation("Fuss-Catalan values must be integers")
    return int(n_val), int(n_plus)


def _n_value(rsd: RootSystemData, m: int) -> Fraction:
    """N evaluated at an arbitrary integer (negative arguments allowed)."""
    h, w = rsd.coxeter_number, rsd.weyl_order
    out = Fraction(1, w)
    for e in rsd.exponents:
        out *= m * h + e + 1
    return out


def check_fuss_reciprocity(rsd: RootSystemData, window: int) -> bool:
    """(-1)^d N(-m) = N+(m-1), as polynomials in m and pointwise."""
    if window < 1:
        raise InvalidInput("window must be >= 1")
    h, d, w = rsd.coxeter_number, rsd.rank, rsd.weyl_order
    lhs: Poly = (Fraction((-1) ** d, w),)
    rhs: Poly = (Fraction(1, w),)
    for e in rsd.exponents:
        lhs = poly_mul(lhs, (Fraction(e + 1), Fraction(-h)))     # -m*h + e + 1
        rhs = poly_mul(rhs, (Fraction(e - 1 - h), Fraction(h)))  # (m-1)*h + e - 1
    if lhs != rhs:
        return False
    for m in range(1, window + 1):
        _, n_plus = fuss_catalan(rsd, m - 1)
        if (-1) ** d * _n_value(rsd, -m) != n_plus:
            return False
    return True


def verify_product_formula(rsd: RootSystemData, *, threads: int = 1) -> bool:
    """Engine chi against the closed product formula, coefficientwise."""
    spec = catalan_arrangement(rsd)
    engine = characteristic_quasipoly(spec, threads=threads)
    return engine.equals(catalan_product_formula(rsd))


# ---------------------------------------------------------------------------
# Graphs and graphical arrangements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimpleGraph:
    """Loopless simple graph on labeled vertices 1..vertex_count."""

    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.edges:
            if not (1 <= i < j <= self.vertex_count):
                raise InvalidInput(f"bad edge ({i}, {j})")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def components(self) -> list[set[int]]:
        parent = {v: v for v in range(1, self.vertex_count + 1)}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j in self.edges:
            parent[find(i)] = find(j)
        groups: dict[int, set[int]] = {}
        for v in parent:
            groups.setdefault(find(v), set()).add(v)
        return sorted(groups.values(), key=min)

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    @property
    def cycle_rank(self) -> int:
        """Rank of the cycle matroid: vertices minus components."""
        return self.vertex_count - len(self.components())

    @staticmethod
    def complete(v: int) -> "SimpleGraph":
        return SimpleGraph(v, frozenset(combinations(range(1, v + 1), 2)))

    @staticmethod
    def path(v: int) -> "SimpleGraph":
        return SimpleGraph(v, frozenset((i, i + 1) for i in range(1, v)))

    @staticmethod
    def cycle(v: int) -> "SimpleGraph":
        if v < 3:
            raise InvalidInput("a cycle needs >= 3 vertices")
        edges = {(i, i + 1) for i in range(1, v)} | {(1, v)}
        return SimpleGraph(v, frozenset(edges))


GRAPH_ENUM_GUARD = 6


def enumerate_connected_graphs(v: int) -> list[SimpleGraph]:
    """All connected simple graphs on the labeled vertex set {1..v}."""
    if v < 1:
        raise InvalidInput("v must be >= 1")
    if v > GRAPH_ENUM_GUARD:
        raise GuardExceeded(f"graph enumeration capped at {GRAPH_ENUM_GUARD} vertices")
    all_edges = list(combinations(range(1, v + 1), 2))
    out = []
    for mask in range(1 << len(all_edges)):
        edges = frozenset(e for i, e in enumerate(all_edges) if mask >> i & 1)
        g = SimpleGraph(v, edges)
        if g.is_connected():
            out.append(g)
    return out


def _edge_form(i: int, j: int, keep: dict[int, int], width: int):
    """The form x_i - x_j with grounded vertices projected out."""
    row = [0] * width
    if i in keep:
        row[keep[i]] += 1
    if j in keep:
        row[keep[j]] -= 1
    return tuple(row)


@dataclass(frozen=True)
class GraphicalArrangement:
    """Edge forms x_i - x_j of a graph, plus their essential realization.

    The raw matrix lives on Q^vertex_count and is rank deficient (rank =
    cycle rank of the graph).  Grounding one vertex per connected
    component deletes columns without changing the column space of any
    edge subset, so ``essential`` is a genuine full-rank spec whose
    characteristic data is the graph's.
    """

    graph: SimpleGraph
    forms: IntMatrix
    essential: ArrangementSpec

    @property
    def cycle_rank(self) -> int:
        return self.graph.cycle_rank


def graphical_arrangement(g: SimpleGraph, label: str = "") -> GraphicalArrangement:
    if not g.edges:
        raise InvalidInput("graphical arrangement needs at least one edge")
    edges = sorted(g.edges)
    raw = tuple(
        _edge_form(i, j, {v: v - 1 for v in range(1, g.vertex_count + 1)}, g.vertex_count)
        for i, j in edges
    )
    grounded = {max(comp) for comp in g.components()}
    kept = [v for v in range(1, g.vertex_count + 1) if v not in grounded]
    keep = {v: idx for idx, v in enumerate(kept)}
    essential_forms = tuple(_edge_form(i, j, keep, len(kept)) for i, j in edges)
    spec = ArrangementSpec(
        len(kept), essential_forms, label=label or f"graph(v={g.vertex_count})"
    )
    return GraphicalArrangement(g, raw, spec)


def check_tu_polynomiality(g: SimpleGraph, *, threads: int = 1) -> bool:
    """Edge matrix total unimodularity and period-1 behaviour of the engine.

    Asserts the raw edge matrix is totally unimodular, that every fitted
    coefficient and the region count have minimal period 1, and that the
    region-count degree equals the cycle rank of the graph.
    """
    ga = graphical_arrangement(g)
    if not is_totally_unimodular(ga.forms):
        return False
    cq = characteristic_quasipoly(ga.essential, threads=threads)
    if any(c.reduced().period != 1 for c in cq.coefficients):
        return False
    reg = regions(cq)
    return reg.reduced().period == 1 and reg.degree == g.cycle_rank


# ---------------------------------------------------------------------------
# The signed-volume identity in type A
# ---------------------------------------------------------------------------

CURIOUS_GUARD = 3


@dataclass(frozen=True)
class CuriousIdentityReport:
    d: int
    lhs: int
    rhs: Fraction
    equal: bool
    per_graph: tuple[tuple[int, int, Fraction], ...]  # (edges, sign, volume)


def verify_curious_identity(d: int) -> CuriousIdentityReport:
    """(d+1)^d as a signed sum of cube-section volumes over connected graphs.

    Full-span subsets of the type A_d form matrix correspond to connected
    graphs on d+1 labeled vertices (the grounded vertex is d+1); each
    contributes (-1)^{edges - d} times the normalized volume of its cube
    section.
    """
    if d < 1:
        raise InvalidInput("d must be >= 1")
    if d > CURIOUS_GUARD:
        raise GuardExceeded(f"signed volume sum capped at d = {CURIOUS_GUARD}")
    lhs = (d + 1) ** d
    keep = {v: v - 1 for v in range(1, d + 1)}  # vertex d+1 grounded
    total = Fraction(0)
    rows = []
    for g in enumerate_connected_graphs(d + 1):
        forms = tuple(_edge_form(i, j, keep, d) for i, j in sorted(g.edges))
        geom = ehrhart.SubsetGeometry(forms)
        if geom.rank != d:
            raise InvariantViolation("connected graph did not give a spanning subset")
        vol = ehrhart.normalized_volume(geom)
        sign = (-1) ** (g.edge_count - d)
        total += sign * vol
        rows.append((g.edge_count, sign, vol))
    return CuriousIdentityReport(d, lhs, total, lhs == total, tuple(rows))
