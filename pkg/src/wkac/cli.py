"""Command-line front end: `wkac {list,show,weights,partitions,det,oracle,verify}`."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import sympy

from . import __version__
from .catalog import (
    FIXTURE_ENV,
    UnknownAlgebraError,
    algebra_names,
    algebra_to_json,
    dual_coxeter,
    load_algebra,
    rat_json,
    sdim_half,
)
from .twist import SectorSpecError, TwistValidationError, make_sector

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not an exact rational: {text!r}") from None


def parse_pair(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected two comma-separated rationals, got {text!r}")
    return parse_rational(parts[0]), parse_rational(parts[1])


def _poly_json(poly, names: tuple[str, ...]) -> list[dict]:
    out = []
    for monom, coef in sorted(poly.terms()):
        c = Fraction(int(coef.numerator), int(coef.denominator))
        out.append({"monomial": {n: e for n, e in zip(names, monom) if e},
                    "coef": rat_json(c)})
    return out


def _expr_json(e: sympy.Expr) -> dict | str:
    e = sympy.nsimplify(e)
    if e.is_Rational:
        return rat_json(Fraction(int(e.p), int(e.q)))
    return str(e)


def _emit(args, payload, text_lines) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# --- subcommands ----------------------------------------------------------------

def cmd_list(args) -> int:
    rows = []
    for name in algebra_names(args.fixtures):
        A = load_algebra(name, args.fixtures)
        rows.append({"name": A.name, "rank": A.rank, "h_dual": rat_json(dual_coxeter(A)),
                     "sdim_half": sdim_half(A), "central_charge": A.central_charge_text})
    lines = [f"{'algebra':<10} {'rank':>4} {'h^v':>5} {'sdim g1/2':>9}  c(k)"]
    lines += [f"{r['name']:<10} {r['rank']:>4} {str(dual_coxeter(load_algebra(r['name'], args.fixtures))):>5} "
              f"{r['sdim_half']:>9}  {r['central_charge']}" for r in rows]
    _emit(args, rows, lines)
    return EXIT_OK


def cmd_show(args) -> int:
    from .weights import central_charge
    A = load_algebra(args.algebra, args.fixtures)
    data = algebra_to_json(A)
    data["central_charge_computed"] = str(central_charge(A))
    lines = [f"{A.name}: rank {A.rank}, h^v = {dual_coxeter(A)}, c = {central_charge(A)}",
             "roots (label: (alpha|theta)/2-coordinate, y-coordinate, parity, grade):"]
    for r in data["roots"]:
        if r["coords"][0]["num"] < 0 or (r["coords"][0]["num"] == 0 and r["coords"][1]["num"] < 0):
            continue
        a, b = (Fraction(c["num"], c["den"]) for c in r["coords"])
        g = Fraction(r["grade"]["num"], r["grade"]["den"])
        mult = f" x{r['mult']}" if r["mult"] > 1 else ""
        lines.append(f"  {r['label']}: ({a}, {b}) {r['parity']}{mult}, grade {g}")
    lines.append(f"Delta_0+ = {data['delta0_plus']}")
    lines.append(f"Delta_1/2+ = {data['delta_half_plus']}  Delta_1/2- = {data['delta_half_minus']}")
    for key in ("rho", "rho0", "rho_half"):
        a, b = (Fraction(c["num"], c["den"]) for c in data[key])
        lines.append(f"{key} = {a} theta + {b} y")
    _emit(args, data, lines)
    return EXIT_OK


def _level(text: str | None):
    if text is None or text.strip().lower() in ("sym", "k"):
        return sympy.Symbol("k")
    return sympy.Rational(str(parse_rational(text)))


def cmd_weights(args) -> int:
    from .weights import AffineWeight, lambda_to_weights
    A = load_algebra(args.algebra, args.fixtures)
    t = make_sector(A, args.sector)
    a, b = parse_pair(args.lam)
    w = lambda_to_weights(A, t, AffineWeight(sympy.Rational(str(a)), sympy.Rational(str(b)), _level(args.k)))
    num, den = sympy.fraction(sympy.cancel(w.h))
    payload = {"algebra": A.name, "sector": t.sector_label, "Lambda": _expr_json(w.Lambda_y),
               "q": _expr_json(w.q(A)), "h_num": str(sympy.expand(num)), "h_den": str(sympy.expand(den))}
    lines = [f"Lambda = {w.Lambda_y} y", f"q = {w.q(A)}", f"h = {sympy.cancel(w.h)}"]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_partitions(args) -> int:
    from .partitions import format_product, lattice_points, partition_count
    A = load_algebra(args.algebra, args.fixtures)
    t = make_sector(A, args.sector)
    level = parse_rational(args.max_level)
    if args.gf:
        text = format_product(A, t, level)
        _emit(args, {"algebra": A.name, "sector": t.sector_label, "product": text}, [text])
        return EXIT_OK
    pts = lattice_points(A, t, level)
    if args.charge is not None:
        c = parse_rational(args.charge)
        pts = [p for p in pts if p[0] == c]
    rows = [(c, l, partition_count(A, t, (c, l))) for c, l in pts]
    payload = [{"charge": rat_json(c), "level": rat_json(l), "count": n} for c, l, n in rows]
    lines = [f"{'charge':>8} {'level':>6} {'count':>6}"]
    lines += [f"{str(c):>8} {str(l):>6} {n:>6}" for c, l, n in rows]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_det(args) -> int:
    from sympy import QQ

    from .determinant import FIELD, assemble_determinant, format_factor
    A = load_algebra(args.algebra, args.fixtures)
    t = make_sector(A, args.sector)
    eta = parse_pair(args.eta)
    d = assemble_determinant(A, t, eta)
    kv = None if args.k is None else parse_rational(args.k)
    names = ("h", "q", "k", "t")
    factors = []
    lines = [f"{A.name} {t.sector_label} at (charge, level) = ({eta[0]}, {eta[1]})"]
    for f, e in d.factors:
        value = f.value
        if kv is not None:
            value = value.subs([(FIELD.gens[2], QQ(kv.numerator, kv.denominator))])
        factors.append({"label": f.label, "kind": f.kind, "exponent": e,
                        "numerator": _poly_json(value.numer, names),
                        "denominator": _poly_json(value.denom, names),
                        "text": format_factor(f, kv)})
        lines.append(f"({format_factor(f, kv)})^{e}    {f.label}")
    base = f"k + {d.h_dual}" if kv is None else str(kv + d.h_dual)
    lines.append(f"({base})^{d.prefactor_exponent}    level prefactor")
    payload = {"algebra": A.name, "sector": t.sector_label, "eta": [rat_json(eta[0]), rat_json(eta[1])],
               "factors": factors, "prefactor": {"base": base, "exponent": d.prefactor_exponent},
               "h_degree": d.h_degree()}
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import compare_with_formula, gram_determinant, verma, weight_spaces
    sector = args.sector.strip().lower()
    sector = {"r": "ramond"}.get(sector, sector)
    if sector not in ("ns", "ramond"):
        raise UsageError("the oracle supports the ns and ramond sectors")
    level = parse_rational(args.max_level)
    rows, lines, failed = [], [], False
    for eta in weight_spaces(args.kind, sector, level):
        det = gram_determinant(args.kind, sector, eta)
        dim = len(verma(args.kind, sector).basis(eta))
        row = {"eta": [rat_json(eta[0]), rat_json(eta[1])], "dim": dim,
               "det": str(sympy.factor(det.as_expr()))}
        line = f"({eta[0]}, {eta[1]}) dim {dim}: det = {row['det']}"
        if args.compare:
            cmp = compare_with_formula(args.kind, sector, eta)
            row["match"] = cmp.matched
            row["ratio"] = str(cmp.ratio)
            line += f"\n    [{'PASS' if cmp.matched else 'FAIL'}] formula ratio {cmp.ratio}"
            failed |= not cmp.matched
        rows.append(row)
        lines.append(line)
    _emit(args, {"kind": args.kind, "sector": sector, "spaces": rows}, lines)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import CRITERIA, run_criterion
    chosen = sorted(CRITERIA) if not args.criterion else sorted(set(args.criterion))
    for n in chosen:
        if n not in CRITERIA:
            raise UsageError(f"no criterion {n}; choose from {sorted(CRITERIA)}")
    results = [run_criterion(n) for n in chosen]
    payload = [{"criterion": r.number, "title": r.title, "passed": r.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in r.report.checks]} for r in results]
    lines = []
    for r in results:
        if args.verbose:
            lines += ["  " + c.line() for c in r.report.checks]
        lines.append(r.line())
    failing = next((r for r in results if not r.passed), None)
    if failing is not None:
        first = failing.report.first_failure()
        lines.append(f"verification failed: {first.line() if first else failing.line()}")
    else:
        lines.append(f"all {len(results)} criteria passed")
    _emit(args, payload, lines)
    return EXIT_FAIL if failing else EXIT_OK


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON with exact {num, den} rationals")
    common.add_argument("--fixtures", help="path to an alternative catalog JSON file")

    p = argparse.ArgumentParser(prog="wkac", description="Kac determinants of minimal W-algebra Verma modules.")
    p.add_argument("--version", action="version", version=f"wkac {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("list", parents=[common], help="list catalogued algebras")
    sp.set_defaults(func=cmd_list)

    sp = sub.add_parser("show", parents=[common], help="roots, gradation and Weyl vectors of an algebra")
    sp.add_argument("algebra")
    sp.set_defaults(func=cmd_show)

    sector_help = "ns, ramond, or general:<param>=<rational>,..."
    sp = sub.add_parser("weights", parents=[common], help="map an affine weight to (Lambda, h)")
    sp.add_argument("algebra")
    sp.add_argument("--sector", default="ns", help=sector_help)
    sp.add_argument("--lambda", dest="lam", required=True, metavar="A,B",
                    help="(lambda|theta) and the y-coordinate of lambda")
    sp.add_argument("--k", default="sym", help="rational level, or 'sym' for formal k")
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("partitions", parents=[common], help="W-partition counts")
    sp.add_argument("algebra")
    sp.add_argument("--sector", default="ns", help=sector_help)
    sp.add_argument("--max-level", default="2")
    sp.add_argument("--charge", help="restrict to one charge")
    sp.add_argument("--gf", action="store_true", help="print the generating product instead")
    sp.set_defaults(func=cmd_partitions)

    sp = sub.add_parser("det", parents=[common], help="factored determinant at one weight space")
    sp.add_argument("algebra")
    sp.add_argument("--sector", default="ns", help=sector_help)
    sp.add_argument("--eta", required=True, metavar="CHARGE,LEVEL")
    sp.add_argument("--k", help="specialize the level to a rational value")
    sp.set_defaults(func=cmd_det)

    sp = sub.add_parser("oracle", parents=[common], help="brute-force Gram determinants for N=1 or N=2")
    sp.add_argument("kind", choices=["N1", "N2"])
    sp.add_argument("--sector", default="ns", help="ns or ramond")
    sp.add_argument("--max-level", default="1")
    sp.add_argument("--compare", action="store_true", help="compare with the factored formula")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    sp.add_argument("--criterion", type=int, action="append", help="run only this criterion (repeatable)")
    sp.add_argument("-v", "--verbose", action="store_true", help="print every individual check")
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.fixtures:
        os.environ[FIXTURE_ENV] = args.fixtures
    try:
        return args.func(args)
    except (UsageError, UnknownAlgebraError, SectorSpecError, TwistValidationError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        parser.print_usage(sys.stderr)
        print(f"wkac: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"wkac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
