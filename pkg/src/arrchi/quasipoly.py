"""Quasi-polynomials: periodic families of polynomial constituents on Z.

A quasi-polynomial of period N is given by N polynomials f_0 .. f_{N-1};
its value at an integer m is f_{m mod N}(m), with the mathematical mod
(so -1 mod 2 = 1).  Constituents make the function total on all of Z,
negative arguments included; the reciprocity checks depend on that.

Residues are indexed 0 .. N-1.  The stored period is not forced to be
minimal; :func:`equals` compares functions, not representations, and
:meth:`QuasiPolynomial.reduced` computes the minimal-period form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import polys
from .errors import InconsistentSamples, InvalidInput, PeriodNotFound


@dataclass(frozen=True)
class QuasiPolynomial:
    period: int
    constituents: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.period < 1:
            raise InvalidInput("period must be >= 1")
        if len(self.constituents) != self.period:
            raise InvalidInput("need exactly one constituent per residue class")
        trimmed = [polys.trim(c) for c in self.constituents]
        width = max((len(c) for c in trimmed), default=0) or 1
        padded = tuple(
            tuple(c) + (Fraction(0),) * (width - len(c)) for c in trimmed
        )
        object.__setattr__(self, "constituents", padded)

    @staticmethod
    def constant(value) -> "QuasiPolynomial":
        return QuasiPolynomial(1, ((Fraction(value),),))

    @staticmethod
    def zero() -> "QuasiPolynomial":
        return QuasiPolynomial.constant(0)

    @staticmethod
    def from_poly(coeffs) -> "QuasiPolynomial":
        return QuasiPolynomial(1, (tuple(Fraction(c) for c in coeffs),))

    def constituent(self, residue: int) -> tuple[Fraction, ...]:
        return self.constituents[residue % self.period]

    def evaluate(self, m: int) -> Fraction:
        return polys.evaluate(self.constituents[m % self.period], m)

    @property
    def degree(self) -> int:
        """Max constituent degree; -1 for the zero quasi-polynomial."""
        return max(polys.degree(c) for c in self.constituents)

    @property
    def is_zero(self) -> bool:
        return all(polys.degree(c) == -1 for c in self.constituents)

    def leading_coefficients(self, power: int) -> tuple[Fraction, ...]:
        """Coefficient of m^power in each constituent."""
        return tuple(
            c[power] if power < len(c) else Fraction(0) for c in self.constituents
        )

    def lifted(self, new_period: int) -> "QuasiPolynomial":
        if new_period % self.period != 0:
            raise InvalidInput("can only lift to a multiple of the period")
        return QuasiPolynomial(
            new_period,
            tuple(self.constituents[j % self.period] for j in range(new_period)),
        )

    def reduced(self) -> "QuasiPolynomial":
        """Equivalent quasi-polynomial with the minimal period."""
        for p in range(1, self.period + 1):
            if self.period % p != 0:
                continue
            if all(
                self.constituents[j] == self.constituents[j % p]
                for j in range(self.period)
            ):
                return QuasiPolynomial(p, self.constituents[:p])
        return self  # unreachable: p == period always matches

    def to_json_obj(self) -> dict:
        return {
            "period": self.period,
            "constituents": [[str(c) for c in cons] for cons in self.constituents],
        }

    @staticmethod
    def from_json_obj(obj: dict) -> "QuasiPolynomial":
        return QuasiPolynomial(
            int(obj["period"]),
            tuple(
                tuple(Fraction(c) for c in cons) for cons in obj["constituents"]
            ),
        )


def equals(f: QuasiPolynomial, g: QuasiPolynomial) -> bool:
    """Whether f(m) = g(m) for every integer m."""
    n = lcm(f.period, g.period)
    return f.lifted(n).constituents == g.lifted(n).constituents


def scale(c, f: QuasiPolynomial) -> QuasiPolynomial:
    return QuasiPolynomial(
        f.period, tuple(polys.scale(c, cons) for cons in f.constituents)
    )


def linear_combine(terms) -> QuasiPolynomial:
    """Pointwise sum of coefficient * quasi-polynomial terms.

    The result is reduced to its minimal period.
    """
    terms = list(terms)
    if not terms:
        return QuasiPolynomial.zero()
    n = lcm(*(f.period for _, f in terms))
    constituents = []
    for j in range(n):
        acc: tuple = ()
        for c, f in terms:
            acc = polys.add(acc, polys.scale(c, f.constituents[j % f.period]))
        constituents.append(acc)
    return QuasiPolynomial(n, tuple(constituents)).reduced()


def precompose_affine(f: QuasiPolynomial, a: int, b: int) -> QuasiPolynomial:
    """The quasi-polynomial g with g(m) = f(a*m + b), for a in {+1, -1}."""
    if a not in (1, -1):
        raise InvalidInput("only the reflections a = +1 / -1 are supported")
    n = f.period
    constituents = tuple(
        polys.compose_linear(f.constituents[(a * j + b) % n], a, b)
        for j in range(n)
    )
    return QuasiPolynomial(n, constituents)


def fit(samples, period: int, degree_bound: int) -> QuasiPolynomial:
    """The unique degree <= degree_bound quasi-polynomial of the given period
    through the samples.

    ``samples`` is an iterable of (m, value) pairs with m >= 0.  Every
    residue class mod ``period`` needs at least degree_bound + 1 samples;
    surplus samples must agree with the interpolant or the fit fails.
    """
    if period < 1:
        raise InvalidInput("period must be >= 1")
    by_residue: list[list[tuple[int, Fraction]]] = [[] for _ in range(period)]
    for m, value in samples:
        if m < 0:
            raise InvalidInput("fit samples must have m >= 0")
        by_residue[m % period].append((m, Fraction(value)))
    constituents = []
    for j, pts in enumerate(by_residue):
        pts.sort()
        if len(pts) < degree_bound + 1:
            raise InconsistentSamples(
                f"residue {j} mod {period}: {len(pts)} samples, "
                f"need {degree_bound + 1}"
            )
        poly = polys.interpolate(pts[: degree_bound + 1])
        for m, value in pts[degree_bound + 1:]:
            if polys.evaluate(poly, m) != value:
                raise InconsistentSamples(
                    f"residue {j} mod {period}: sample at m={m} deviates from "
                    "the interpolant (wrong period or degree bound)"
                )
        constituents.append(poly)
    return QuasiPolynomial(period, tuple(constituents))


def minimal_period_fit(
    value_oracle,
    degree_bound: int,
    period_cap: int,
    candidates=None,
) -> QuasiPolynomial:
    """Smallest-period fit of a sampled integer function.

    Tries periods in the order given by ``candidates`` (default 1..cap).
    For each candidate N the oracle is sampled at degree_bound + 3 points
    per residue class: degree_bound + 1 interpolation points plus two
    held-out validation points, which guard against accidental low-period
    fits.  Raises :class:`PeriodNotFound` if no candidate works.
    """
    if candidates is None:
        candidates = range(1, period_cap + 1)
    cache: dict[int, Fraction] = {}

    def sample(m: int) -> Fraction:
        if m not in cache:
            cache[m] = Fraction(value_oracle(m))
        return cache[m]

    for n in candidates:
        if n > period_cap:
            break
        points = [
            (m, sample(m))
            for j in range(n)
            for m in (j + k * n for k in range(degree_bound + 3))
        ]
        try:
            return fit(points, n, degree_bound)
        except InconsistentSamples:
            continue
    raise PeriodNotFound(f"no period up to {period_cap} fits the sampled values")
