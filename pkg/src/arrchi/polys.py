"""Dense univariate polynomials over Q as ascending coefficient tuples.

The zero polynomial is the empty tuple.  These helpers back both the
quasi-polynomial constituents (variable m) and the characteristic
polynomials (variable q).
"""

from __future__ import annotations

from fractions import Fraction

Poly = tuple[Fraction, ...]


def trim(coeffs) -> Poly:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def degree(p: Poly) -> int:
    """Degree of the polynomial; -1 for the zero polynomial."""
    return len(trim(p)) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim(
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)
    )


def scale(c, p: Poly) -> Poly:
    c = Fraction(c)
    return trim(c * x for x in p)


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def evaluate(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose_linear(p: Poly, a: int, b: int) -> Poly:
    """The polynomial m -> p(a*m + b), expanded exactly."""
    acc: Poly = ()
    for c in reversed(p):
        # acc <- acc*(a m + b) + c
        shifted = [Fraction(0)] + [a * x for x in acc]
        for i, x in enumerate(acc):
            shifted[i] += b * x
        shifted[0] += Fraction(c)
        acc = trim(shifted)
    return acc


def interpolate(points) -> Poly:
    """The unique polynomial of degree < len(points) through the given points.

    ``points`` is a sequence of (x, y) pairs with distinct x.  Lagrange form,
    exact over Q.
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    result: Poly = ()
    for i, (xi, yi) in enumerate(pts):
        term: Poly = (Fraction(1),)
        denom = Fraction(1)
        for j, (xj, _) in enumerate(pts):
            if i == j:
                continue
            term = mul(term, (-xj, Fraction(1)))
            denom *= xi - xj
        result = add(result, scale(yi / denom, term))
    return result


def format_poly(p: Poly, var: str = "m", descending: bool = True) -> str:
    """Human-readable rendering like ``q^2 - 6q + 9`` or ``3m + 2``."""
    p = trim(p)
    if not p:
        return "0"
    terms = []
    indices = range(len(p) - 1, -1, -1) if descending else range(len(p))
    for k in indices:
        c = p[k]
        if c == 0:
            continue
        if k == 0:
            body = str(abs(c))
        else:
            mag = abs(c)
            coeff = "" if mag == 1 else (str(mag) if mag.denominator == 1 else f"({mag})")
            body = f"{coeff}{var}" + (f"^{k}" if k > 1 else "")
        terms.append(("-" if c < 0 else "+", body))
    sign, body = terms[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text
