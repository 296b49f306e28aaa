"""Twist assignments on the root system and the twisted Weyl vector."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import sympy

from .catalog import (
    THETA,
    AlgebraData,
    RootVec,
    Vec,
    ZERO,
    bilinear,
    dual_coxeter,
    load_algebra,
    minimal_gradation,
    vadd,
    vscale,
    vsub,
    weyl_vectors,
)
from .report import Report


class TwistValidationError(ValueError):
    pass


class SectorSpecError(ValueError):
    pass


def frac_mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, eq=False)
class TwistAssignment:
    algebra: str
    eps: Mapping[str, Fraction]
    sector_label: str
    params: Mapping[str, Fraction]

    @property
    def kind(self) -> str:
        return self.sector_label.split(":", 1)[0]

    def of(self, root: RootVec) -> Fraction:
        """Twist of any root, positive or negative, reduced into [0, 1)."""
        if root.label in self.eps:
            return self.eps[root.label]
        return frac_mod1(-self.eps[(-root).label])

    def key(self) -> tuple:
        return (self.algebra, tuple(sorted(self.eps.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, TwistAssignment) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


@dataclass(frozen=True)
class TwistedRho:
    rho_tilde: Vec
    algebra: str
    eps: TwistAssignment


_PARAM_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*(-?\d+(?:/\d+)?)\s*$")


def parse_sector(spec: str) -> tuple[str, dict[str, Fraction]]:
    """Parse 'ns', 'ramond' or 'general:eps=1/8,sigma=1/2'."""
    s = spec.strip().lower()
    if s in ("ns", "neveu-schwarz"):
        return "ns", {}
    if s in ("r", "ramond"):
        return "ramond", {}
    if s.startswith("general"):
        _, _, rest = spec.partition(":")
        params = {}
        for part in filter(None, (p.strip() for p in rest.split(","))):
            m = _PARAM_RE.match(part)
            if not m:
                raise SectorSpecError(f"bad sector parameter {part!r}")
            params[m.group(1)] = Fraction(m.group(2))
        return "general", params
    raise SectorSpecError(f"unknown sector {spec!r}; use ns, ramond or general:eps=..,sigma=..")


@lru_cache(maxsize=None)
def _linear_form(expr: str) -> tuple[Fraction, tuple[tuple[str, Fraction], ...]]:
    e = sympy.expand(sympy.sympify(expr))
    coeffs = []
    for sym in sorted(e.free_symbols, key=str):
        c = e.coeff(sym)
        if not c.is_Rational or sympy.expand(e - c * sym).has(sym):
            raise SectorSpecError(f"twist expression {expr!r} is not linear")
        coeffs.append((str(sym), Fraction(int(c.p), int(c.q))))
    const = e.subs({sympy.Symbol(n): 0 for n, _ in coeffs})
    return Fraction(int(const.p), int(const.q)), tuple(coeffs)


def _eval_linear(expr: str, params: Mapping[str, Fraction]) -> Fraction:
    const, coeffs = _linear_form(expr)
    missing = [n for n, _ in coeffs if n not in params]
    if missing:
        raise SectorSpecError(f"twist expression {expr!r} not determined by {dict(params)}")
    return const + sum((c * params[n] for n, c in coeffs), Fraction(0))


@lru_cache(maxsize=None)
def _root_triples(A: AlgebraData) -> tuple[tuple[RootVec, RootVec, RootVec], ...]:
    # positive pairs first so the reported triple is the most readable one
    pairs = itertools.chain(itertools.product(A.positive_roots, repeat=2),
                            itertools.product(A.roots, repeat=2))
    out = []
    for a, b in pairs:
        s = A.find(vadd(a.coords, b.coords), a.charge_tag + b.charge_tag)
        if s is not None:
            out.append((a, b, s))
    return tuple(out)


def validate_twist(A: AlgebraData, t: TwistAssignment) -> None:
    """Raise TwistValidationError on the first triple violating additivity mod Z."""
    if t.of(A.theta) != 0:
        raise TwistValidationError(f"{A.name}: eps(theta) = {t.of(A.theta)} must vanish")
    for a, b, s in _root_triples(A):
        if frac_mod1(t.of(a) + t.of(b) - t.of(s)) != 0:
            raise TwistValidationError(
                f"{A.name}: additivity violated at ({a.label}, {b.label}, {s.label}): "
                f"{t.of(a)} + {t.of(b)} != {t.of(s)} mod 1")


def twist_from_values(A: AlgebraData, values: Mapping[str, object], label: str = "custom") -> TwistAssignment:
    """Explicit per-root values on the positive roots; validated."""
    eps = {}
    for r in A.positive_roots:
        if r.label not in values:
            raise SectorSpecError(f"{A.name}: missing twist value for {r.label}")
        eps[r.label] = frac_mod1(Fraction(str(values[r.label])))
    t = TwistAssignment(A.name, MappingProxyType(eps), label, MappingProxyType({}))
    validate_twist(A, t)
    return t


def _family_twist(A: AlgebraData, params: Mapping[str, Fraction], label: str) -> TwistAssignment:
    tw = A.fixture["twist"]
    unknown = set(params) - set(tw["params"])
    if unknown:
        raise SectorSpecError(f"{A.name}: unknown twist parameter(s) {sorted(unknown)}; "
                              f"expected {tw['params']}")
    full = {p: Fraction(params.get(p, 0)) for p in tw["params"]}
    eps = {lab: frac_mod1(_eval_linear(expr, full)) for lab, expr in tw["roots"].items()}
    t = TwistAssignment(A.name, MappingProxyType(eps), label, MappingProxyType(full))
    validate_twist(A, t)
    return t


def family_twist(A: AlgebraData | str, params: Mapping[str, object]) -> TwistAssignment:
    A = load_algebra(A)
    p = {k: Fraction(str(v)) for k, v in params.items()}
    body = ",".join(f"{k}={v}" for k, v in sorted(p.items()))
    return _family_twist(A, p, f"general:{body}")


@lru_cache(maxsize=None)
def _make_sector(A: AlgebraData, kind: str, params: tuple) -> TwistAssignment:
    if kind == "ns":
        eps = {r.label: Fraction(0) for r in A.positive_roots}
        t = TwistAssignment(A.name, MappingProxyType(eps), "ns",
                            MappingProxyType({p: Fraction(0) for p in A.fixture["twist"]["params"]}))
    elif kind == "ramond":
        g = minimal_gradation(A)
        half = {r.label for r in g.delta_half}
        eps = {r.label: Fraction(1, 2) if r.label in half else Fraction(0) for r in A.positive_roots}
        rp = {k: Fraction(v) for k, v in A.fixture["sectors"]["ramond"].items()}
        t = TwistAssignment(A.name, MappingProxyType(eps), "ramond", MappingProxyType(rp))
    else:
        return _family_twist(A, dict(params), "general:" + ",".join(f"{k}={v}" for k, v in params))
    validate_twist(A, t)
    return t


def make_sector(A: AlgebraData | str, spec: str | Mapping | TwistAssignment) -> TwistAssignment:
    A = load_algebra(A)
    if isinstance(spec, TwistAssignment):
        return spec
    if isinstance(spec, Mapping):
        return twist_from_values(A, spec)
    kind, params = parse_sector(spec)
    return _make_sector(A, kind, tuple(sorted(params.items())))


def is_special(t: TwistAssignment) -> str | None:
    """'ns' or 'ramond' when the assignment coincides with one of them."""
    A = load_algebra(t.algebra)
    for kind in ("ns", "ramond"):
        if t == make_sector(A, kind):
            return kind
    return None


# --- twisted rho -----------------------------------------------------------

def twisted_rho(A: AlgebraData, t: TwistAssignment) -> TwistedRho:
    terms = [vscale(r.sign * (1 - 2 * t.of(r)), r.coords) for r in A.positive_roots]
    return TwistedRho(vscale(Fraction(1, 2), vadd(ZERO, *terms)), A.name, t)


def affine_positive_roots(A: AlgebraData, t: TwistAssignment, max_m: Fraction = Fraction(2)):
    """Positive roots (alpha, tag, m) of the twisted loop algebra with m <= max_m."""
    out = set()
    pos = {r.key for r in A.positive_roots}
    for r in A.roots:
        e = t.of(r)
        m = e if (r.key in pos or e > 0) else Fraction(1)
        while m <= max_m:
            out.add((r.coords, r.charge_tag, m))
            m += 1
    for m in range(1, int(max_m) + 1):
        out.add((ZERO, 0, Fraction(m)))
    return out


def affine_simple_roots(A: AlgebraData, t: TwistAssignment) -> list[tuple[Vec, int, Fraction]]:
    """Indecomposable positive roots; charge tags must add for a decomposition."""
    roots = affine_positive_roots(A, t)
    simple = []
    for x in sorted(roots):
        if not any((vsub(x[0], y[0]), x[1] - y[1], x[2] - y[2]) in roots for y in roots):
            simple.append(x)
    return simple


def verify_rho_conjecture(A: AlgebraData, t: TwistAssignment) -> Report:
    rep = Report(f"twisted Weyl vector for {A.name} in {t.sector_label}")
    hv = dual_coxeter(A)
    rt = twisted_rho(A, t).rho_tilde
    simple = affine_simple_roots(A, t)
    expected = len(A.simple_roots) + 1
    if len(simple) != expected:
        rep.add(f"{A.name} {t.sector_label}: simple-root extraction", True,
                f"indeterminate: found {len(simple)} indecomposable roots, expected {expected}")
        return rep
    for alpha, _tag, m in simple:
        # (D|K) = 1 and rho_hat = (rho_tilde, h_dual, 0); affine roots have no K part
        lhs = 2 * (bilinear(A, rt, alpha) + hv * m)
        rhs = bilinear(A, alpha, alpha)
        rep.add(f"{A.name} {t.sector_label}: 2(rho|a) = (a|a) at ({alpha[0]}theta+{alpha[1]}y, {m})",
                lhs == rhs, f"{lhs} vs {rhs}")
    return rep


def rho_conjecture_indeterminate(rep: Report) -> bool:
    return any("indeterminate" in c.detail for c in rep.checks)


def ramond_rho_closed_form(A: AlgebraData) -> Vec:
    return vadd(weyl_vectors(A).rho0, vscale(Fraction(1, 2), THETA))


def family_grid(A: AlgebraData, values=(0, Fraction(1, 8), Fraction(1, 4), Fraction(3, 8), Fraction(1, 2))):
    """All parameter points drawn from `values` at which the family twist is consistent."""
    names = A.fixture["twist"]["params"]
    grid = []
    for combo in itertools.product(values, repeat=len(names)):
        point = dict(zip(names, map(Fraction, combo)))
        try:
            family_twist(A, point)
        except TwistValidationError:
            continue
        grid.append(point)
    return grid
