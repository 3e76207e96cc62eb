"""Command-line interface.

Exit codes: 0 success, 1 a mathematical check failed, 2 malformed input,
3 a size guard or precondition refused to run.

Arrangement files are plain text: a header line ``d=<int>``, then one form
per line as d space-separated integers; ``#`` starts a comment and blank
lines are ignored.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import catalog, ehrhart, poset
from .charpoly import (
    ArrangementSpec,
    CharQuasiPoly,
    SUBSET_GUARD,
    bounded_regions,
    characteristic_quasipoly,
    check_reciprocity,
    check_special_reciprocity,
    corollary1_leading,
    random_arrangement,
    regions,
    sign_scan,
)
from .errors import GuardExceeded, InvalidInput, InvariantViolation
from .polys import format_poly
from .quasipoly import QuasiPolynomial, equals, precompose_affine, scale

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_GUARD = 3

ALL_CHECKS = ("reciprocity", "special", "corollary1", "signs", "ehrrec")


# ---------------------------------------------------------------------------
# Arrangement files
# ---------------------------------------------------------------------------

def parse_arrangement_text(text: str, label: str = "") -> ArrangementSpec:
    d = None
    forms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if d is None:
            if not line.startswith("d="):
                raise InvalidInput(f"line {lineno}: expected header 'd=<int>'")
            try:
                d = int(line[2:].strip())
            except ValueError:
                raise InvalidInput(f"line {lineno}: bad dimension {line[2:]!r}") from None
            if d < 1:
                raise InvalidInput(f"line {lineno}: dimension must be >= 1")
            continue
        try:
            row = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise InvalidInput(f"line {lineno}: forms must be integers") from None
        if len(row) != d:
            raise InvalidInput(
                f"line {lineno}: expected {d} integers, found {len(row)}"
            )
        if all(x == 0 for x in row):
            raise InvalidInput(f"line {lineno}: zero form")
        forms.append(row)
    if d is None:
        raise InvalidInput("empty arrangement file")
    if len(forms) < d:
        raise InvalidInput(f"need at least {d} forms, found {len(forms)}")
    return ArrangementSpec(d, tuple(forms), label=label)


def format_arrangement_file(spec: ArrangementSpec, comments: list[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"d={spec.dimension}")
    lines += [" ".join(str(x) for x in row) for row in spec.forms]
    return "\n".join(lines) + "\n"


def load_arrangement(path: str) -> ArrangementSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    return parse_arrangement_text(text, label=os.path.basename(path))


# ---------------------------------------------------------------------------
# Catalog family names
# ---------------------------------------------------------------------------

def family_arrangement(name: str):
    """Resolve a family identifier to (spec, extras-dict)."""
    if name == "ex1":
        return catalog.example_two_forms(), {}
    if name.startswith("coord:"):
        return coordinate_family(name), {}
    if name.startswith("root:"):
        token = name[5:]
        if len(token) < 2:
            raise InvalidInput(f"bad root system name {token!r}")
        rsd = catalog.root_system(token[0], int(token[1:]))
        return catalog.catalan_arrangement(rsd), {"root_system": rsd}
    if name.startswith("graph:"):
        g = graph_by_name(name[6:])
        ga = catalog.graphical_arrangement(g, label=name)
        return ga.essential, {"graph": g, "graphical": ga}
    raise InvalidInput(f"unknown family {name!r}")


def coordinate_family(name: str) -> ArrangementSpec:
    try:
        d = int(name.split(":", 1)[1])
    except ValueError:
        raise InvalidInput(f"bad coordinate family {name!r}") from None
    return catalog.coordinate_arrangement(d)


def graph_by_name(token: str) -> catalog.SimpleGraph:
    if token == "2K2":
        return catalog.SimpleGraph(4, frozenset({(1, 2), (3, 4)}))
    kind, size = token[:1], token[1:]
    try:
        v = int(size)
    except ValueError:
        raise InvalidInput(f"unknown graph {token!r}") from None
    if kind == "K":
        return catalog.SimpleGraph.complete(v)
    if kind == "P":
        return catalog.SimpleGraph.path(v)
    if kind == "C":
        return catalog.SimpleGraph.cycle(v)
    raise InvalidInput(f"unknown graph {token!r}")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def qp_json(qp: QuasiPolynomial) -> dict:
    return qp.to_json_obj()


def qp_lines(qp: QuasiPolynomial, var: str = "m") -> list[str]:
    return [
        f"m ≡ {j} (mod {qp.period}): {format_poly(cons, var)}"
        for j, cons in enumerate(qp.constituents)
    ]


def coeff_vector_json(coeffs) -> list[str]:
    return [str(Fraction(c)) for c in coeffs]


def q_poly_text(coeffs) -> str:
    return format_poly(tuple(Fraction(c) for c in coeffs), var="q")


def arrangement_json(spec: ArrangementSpec) -> dict:
    return {
        "label": spec.label,
        "dimension": spec.dimension,
        "n_forms": spec.size,
        "forms": [list(row) for row in spec.forms],
    }


class DocumentPrinter:
    """Collects a stable result document plus human-readable lines."""

    def __init__(self, command: str, spec: ArrangementSpec | None):
        self.doc = {"command": command}
        if spec is not None:
            self.doc["arrangement"] = arrangement_json(spec)
        self.lines: list[str] = []
        if spec is not None:
            label = spec.label or "<unnamed>"
            self.lines.append(
                f"arrangement {label}: d={spec.dimension}, {spec.size} forms"
            )
        self.warnings: list[str] = []
        self._start = time.perf_counter()

    def emit(self, as_json: bool, stream=None) -> None:
        stream = stream or sys.stdout
        if self.warnings:
            self.doc["warnings"] = self.warnings
        self.doc["timings"] = {"total_s": round(time.perf_counter() - self._start, 6)}
        if as_json:
            print(json.dumps(self.doc, indent=2), file=stream)
        else:
            for line in self.lines:
                print(line, file=stream)
            for warning in self.warnings:
                print(f"warning: {warning}", file=stream)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def run_charpoly(spec: ArrangementSpec, args) -> int:
    out = DocumentPrinter("charpoly", spec)
    cq = _engine(spec, args)
    if args.m is not None:
        coeffs = cq.coefficients_at(args.m)
        out.doc["result"] = {"m": args.m, "chi": coeff_vector_json(coeffs)}
        out.lines.append(f"chi(q, {args.m}) = {q_poly_text(coeffs)}")
    else:
        out.doc["result"] = {
            "coefficients": [qp_json(c) for c in cq.coefficients]
        }
        for i, c in enumerate(cq.coefficients):
            out.lines.append(f"c_{i}(m), coefficient of q^{i}:")
            out.lines += ["  " + s for s in qp_lines(c)]
    out.emit(args.json)
    return EXIT_OK


def run_regions(spec: ArrangementSpec, args) -> int:
    out = DocumentPrinter("regions", spec)
    cq = _engine(spec, args)
    qp = bounded_regions(cq) if args.bounded else regions(cq)
    kind = "bounded_regions" if args.bounded else "regions"
    lower_ok = True
    if not args.bounded:
        d = spec.dimension
        lower_ok = all(
            qp.evaluate(m) >= (2 * m + 2) ** d for m in range(0, 11)
        )
    if args.m is not None:
        value = qp.evaluate(args.m)
        out.doc["result"] = {"m": args.m, kind: str(value)}
        out.lines.append(f"{kind}({args.m}) = {value}")
    else:
        out.doc["result"] = {kind: qp_json(qp)}
        out.lines.append(f"{kind}(m):")
        out.lines += ["  " + s for s in qp_lines(qp)]
    if not args.bounded:
        out.doc["checks"] = {"lower_bound_(2m+2)^d": lower_ok}
        out.lines.append(f"lower bound (2m+2)^d for m <= 10: {_verdict(lower_ok)}")
    out.emit(args.json)
    return EXIT_OK if lower_ok else EXIT_CHECK_FAILED


def _reciprocity_failure_details(cq: CharQuasiPoly) -> list[str]:
    d = cq.dimension
    details = []
    for i, c in enumerate(cq.coefficients):
        lhs = precompose_affine(c, -1, 0)
        rhs = scale((-1) ** (d - i), precompose_affine(c, 1, -1))
        if not equals(lhs, rhs):
            details.append(f"coefficient of q^{i}: c_{i}(-m) != (-1)^{d - i} c_{i}(m-1)")
            details += ["  lhs " + s for s in qp_lines(lhs)]
            details += ["  rhs " + s for s in qp_lines(rhs)]
            for m in range(0, 8):
                a, b = lhs.evaluate(m), rhs.evaluate(m)
                if a != b:
                    details.append(f"  first pointwise deviation at m={m}: {a} != {b}")
                    break
    return details


def run_verify(spec: ArrangementSpec, args) -> int:
    out = DocumentPrinter("verify", spec)
    checks = args.checks.split(",") if args.checks else list(ALL_CHECKS)
    for c in checks:
        if c not in ALL_CHECKS:
            raise InvalidInput(f"unknown check {c!r}; choose from {','.join(ALL_CHECKS)}")
    cq = _engine(spec, args)
    verdicts: dict[str, bool] = {}
    failed_details: list[str] = []

    if "reciprocity" in checks:
        ok = check_reciprocity(cq)
        verdicts["reciprocity"] = ok
        if not ok:
            failed_details += _reciprocity_failure_details(cq)
    if "special" in checks:
        verdicts["special"] = check_special_reciprocity(spec, cq=cq)
    if "corollary1" in checks:
        try:
            corollary1_leading(spec, cq=cq)
            verdicts["corollary1"] = True
        except InvariantViolation as exc:
            verdicts["corollary1"] = False
            failed_details.append(str(exc))
    if "ehrrec" in checks:
        seen = set()
        ok = True
        for _, geom in _subset_geoms(spec):
            if geom.key in seen:
                continue
            seen.add(geom.key)
            if not ehrhart.verify_ehrhart_reciprocity(geom, args.window):
                ok = False
                failed_details.append(
                    f"dilate-count reciprocity failed for a rank-{geom.rank} subset"
                )
        verdicts["ehrrec"] = ok
    if "signs" in checks:
        report = sign_scan(cq, args.window)
        out.doc["sign_scan"] = {
            "window": report.window,
            "values_positive": report.values_positive,
            "negative_normalized_coefficients": [
                list(t) for t in report.negative_coefficients
            ],
        }
        out.lines.append(
            f"sign scan (window {report.window}): normalized values positive: "
            f"{_verdict(report.values_positive)}; "
            f"{len(report.negative_coefficients)} negative normalized "
            "constituent coefficients (reported, not asserted)"
        )

    out.doc["checks"] = verdicts
    for name, ok in verdicts.items():
        out.lines.append(f"check {name}: {_verdict(ok)}")
    out.lines += failed_details
    out.emit(args.json)
    asserted = [v for k, v in verdicts.items()]
    return EXIT_OK if all(asserted) else EXIT_CHECK_FAILED


def run_oracle(spec: ArrangementSpec, args) -> int:
    out = DocumentPrinter("oracle", spec)
    if args.m is None:
        raise InvalidInput("oracle needs --m")
    cq = _engine(spec, args)
    engine_coeffs = cq.coefficients_at(args.m)
    method = args.method
    rc = EXIT_OK
    if method in ("mobius", "whitney"):
        hyperplanes = poset.build_hyperplanes(spec, args.m)
        if method == "mobius":
            oracle_coeffs = poset.mobius_chi(
                poset.intersection_poset(hyperplanes, spec.dimension)
            )
        else:
            oracle_coeffs = poset.whitney_chi(
                hyperplanes, spec.dimension,
                guard=args.whitney_guard, force=args.force,
            )
        match = tuple(Fraction(x) for x in oracle_coeffs) == tuple(engine_coeffs)
        out.doc["result"] = {
            "m": args.m,
            "method": method,
            "oracle_chi": coeff_vector_json(oracle_coeffs),
            "engine_chi": coeff_vector_json(engine_coeffs),
            "match": match,
        }
        out.lines.append(f"oracle ({method}): {q_poly_text(oracle_coeffs)}")
        out.lines.append(f"engine:          {q_poly_text(engine_coeffs)}")
        out.lines.append(f"match: {_verdict(match)}")
        if not match:
            rc = EXIT_CHECK_FAILED
    elif method.startswith("ff:"):
        p = int(method[3:])
        report = poset.finite_field_count(spec, args.m, p, cq=cq)
        out.doc["result"] = {
            "m": args.m,
            "method": f"ff:{p}",
            "count": report.count,
            "engine_chi_at_p": report.chi_value,
            "match": report.matches,
        }
        out.lines.append(
            f"finite field F_{p}: {report.count} points off the arrangement; "
            f"chi({p}, {args.m}) = {report.chi_value}"
        )
        if not report.matches:
            out.warnings.append(
                f"finite-field count differs from chi({p}, {args.m}); "
                "p may be below the validity threshold"
            )
    else:
        raise InvalidInput(f"unknown oracle method {method!r}")
    out.emit(args.json)
    return rc


def run_catalog(args) -> int:
    spec, extras = family_arrangement(args.family)
    if args.emit:
        comments = [f"family: {args.family}"]
        if "root_system" in extras:
            rsd = extras["root_system"]
            comments.append(
                f"exponents: {' '.join(map(str, rsd.exponents))}; "
                f"h = {rsd.coxeter_number}; |W| = {rsd.weyl_order}"
            )
        sys.stdout.write(format_arrangement_file(spec, comments))
        return EXIT_OK
    if not args.run:
        raise InvalidInput("catalog needs --emit or --run <subcommand>")
    rc = EXIT_OK
    if "root_system" in extras:
        rsd = extras["root_system"]
        meta = {
            "exponents": list(rsd.exponents),
            "coxeter_number": rsd.coxeter_number,
            "weyl_order": rsd.weyl_order,
        }
        print(
            f"root system {rsd.name}: exponents {rsd.exponents}, "
            f"h = {rsd.coxeter_number}, |W| = {rsd.weyl_order}"
            if not args.json else json.dumps({"root_system": meta})
        )
        if args.run == "verify":
            product_ok = catalog.verify_product_formula(rsd, threads=args.threads)
            fuss_ok = catalog.check_fuss_reciprocity(rsd, args.window)
            line = {
                "product_formula": product_ok,
                "fuss_reciprocity": fuss_ok,
            }
            print(
                f"product formula: {_verdict(product_ok)}; "
                f"fuss reciprocity: {_verdict(fuss_ok)}"
                if not args.json else json.dumps({"root_checks": line})
            )
            if not (product_ok and fuss_ok):
                rc = EXIT_CHECK_FAILED
    if "graph" in extras and not args.json:
        g = extras["graph"]
        print(
            f"graph on {g.vertex_count} vertices, {g.edge_count} edges, "
            f"cycle rank {g.cycle_rank} (essentialized to d={spec.dimension})"
        )
    runner = {
        "charpoly": run_charpoly,
        "regions": run_regions,
        "verify": run_verify,
        "oracle": run_oracle,
    }.get(args.run)
    if runner is None:
        raise InvalidInput(f"cannot pipe a family into {args.run!r}")
    sub_rc = runner(spec, args)
    return max(rc, sub_rc)


def run_identity(args) -> int:
    if not args.curious:
        raise InvalidInput("identity currently only supports --curious")
    report = catalog.verify_curious_identity(args.d)
    out = DocumentPrinter("identity", None)
    out.doc["result"] = {
        "d": report.d,
        "lhs": report.lhs,
        "rhs": str(report.rhs),
        "equal": report.equal,
        "per_graph": [
            {"edges": e, "sign": s, "volume": str(v)} for e, s, v in report.per_graph
        ],
    }
    out.lines.append(f"lhs = (d+1)^d = {report.lhs}")
    for e, s, v in report.per_graph:
        out.lines.append(f"  {e} edges: sign {s:+d}, volume {v}")
    out.lines.append(
        f"rhs = signed volume sum over {len(report.per_graph)} connected graphs "
        f"= {report.rhs}"
    )
    out.lines.append(f"equal: {_verdict(report.equal)}")
    out.emit(args.json)
    return EXIT_OK if report.equal else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _verdict(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def _engine(spec: ArrangementSpec, args) -> CharQuasiPoly:
    return characteristic_quasipoly(
        spec,
        threads=args.threads,
        subset_guard=args.subset_guard,
        force=args.force,
    )


def _subset_geoms(spec: ArrangementSpec):
    from .charpoly import _geometries_by_subset

    return _geometries_by_subset(spec.forms)


def _parse_random(text: str) -> ArrangementSpec:
    params = {}
    for part in text.split(","):
        key, _, value = part.partition("=")
        params[key.strip()] = int(value)
    missing = {"n", "d", "seed"} - params.keys()
    if missing:
        raise InvalidInput(f"--random needs n=,d=,seed= (missing {sorted(missing)})")
    return random_arrangement(params["n"], params["d"], params["seed"])


def _resolve_spec(args) -> ArrangementSpec:
    if getattr(args, "random", None):
        if args.input:
            raise InvalidInput("give either an input file or --random, not both")
        return _parse_random(args.random)
    if not args.input:
        raise InvalidInput("no input file given")
    return load_arrangement(args.input)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arrchi",
        description="Characteristic quasi-polynomials of deformed hyperplane "
        "arrangements, with exact verification commands.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("input", nargs="?", help="arrangement file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker processes for subset fits (default: cores)")
        p.add_argument("--force", action="store_true",
                       help="override exponential-size guards")
        p.add_argument("--subset-guard", type=int, default=SUBSET_GUARD,
                       help="max forms before the engine refuses (default 20)")
        p.add_argument("--whitney-guard", type=int, default=poset.WHITNEY_GUARD,
                       help="max hyperplanes for the signed subset sum (default 18)")
        p.add_argument("--window", type=int, default=5,
                       help="pointwise check window (default 5)")

    p = sub.add_parser("charpoly", help="chi(q, m), symbolic or at a concrete m")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--symbolic", action="store_true")

    p = sub.add_parser("regions", help="region or bounded-region counts")
    common(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--m", type=int)
    g.add_argument("--symbolic", action="store_true")
    p.add_argument("--bounded", action="store_true")

    p = sub.add_parser("verify", help="run the reciprocity and volume checks")
    common(p)
    p.add_argument("--checks", help=f"comma list from {','.join(ALL_CHECKS)}")
    p.add_argument("--random", help="n=<int>,d=<int>,seed=<int> instead of a file")

    p = sub.add_parser("oracle", help="independent chi at a concrete m")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", default="mobius",
                   help="mobius | whitney | ff:<prime>")

    p = sub.add_parser("catalog", help="built-in arrangement families")
    common(p, with_input=False)
    p.add_argument("--family", required=True,
                   help="ex1 | coord:<d> | root:<X><r> | graph:<K|P|C><n> | graph:2K2")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--emit", action="store_true", help="write the arrangement file")
    g.add_argument("--run", help="pipe into charpoly|regions|verify|oracle")
    p.add_argument("--m", type=int)
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--bounded", action="store_true")
    p.add_argument("--checks")
    p.add_argument("--method", default="mobius")

    p = sub.add_parser("identity", help="signed-volume identities")
    common(p, with_input=False)
    p.add_argument("--curious", action="store_true")
    p.add_argument("--d", type=int, required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m", None) is not None and args.m < 0:
        print("error: --m must be >= 0", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        if args.subcommand == "catalog":
            return run_catalog(args)
        if args.subcommand == "identity":
            return run_identity(args)
        spec = _resolve_spec(args)
        runner = {
            "charpoly": run_charpoly,
            "regions": run_regions,
            "verify": run_verify,
            "oracle": run_oracle,
        }[args.subcommand]
        return runner(spec, args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except GuardExceeded as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
