"""Determinant factors of minimal W-algebra Verma modules and their assembly.

Factors are elements of the rational function field QQ(h, q, k, t) where t is
(lambda|theta); the finished factors never depend on t.  Two constructions are
kept side by side:

* the derivation route, which pairs affine factors phi and rewrites them in
  terms of (Lambda, h) through the weight map, and
* the displayed closed forms for the NS, Ramond and general twisted sectors.

Both must agree, and both must agree with the per-algebra fixtures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

import sympy
from sympy import QQ
from sympy.polys.fields import field as make_field

from .catalog import (
    THETA,
    AlgebraData,
    RootVec,
    bilinear,
    dual_coxeter,
    is_theta_half,
    load_algebra,
    minimal_gradation,
    natural,
    vscale,
    weyl_vectors,
)
from .partitions import PartitionCounter, counter, level_reach, positive_roots_W
from .report import Report
from .twist import TwistAssignment, make_sector, twisted_rho
from .weights import eps_sum, natural_shift, vacuum_shifts

FIELD, h_, q_, k_, t_ = make_field("h,q,k,t", QQ)
H_SYM, Q_SYM, K_SYM, T_SYM = sympy.symbols("h q k t")
SYMBOLS = {"h": H_SYM, "q": Q_SYM, "k": K_SYM}


class ParityError(ValueError):
    pass


class DeterminantConsistencyError(AssertionError):
    pass


def qq(x):
    x = Fraction(x)
    return FIELD(QQ(x.numerator, x.denominator))


def to_expr(f) -> sympy.Expr:
    return f.as_expr(H_SYM, Q_SYM, K_SYM, T_SYM)


def from_expr(e) -> object:
    e = sympy.sympify(e)
    return FIELD.from_expr(e.subs({H_SYM: sympy.Symbol("h"), Q_SYM: sympy.Symbol("q"),
                                   K_SYM: sympy.Symbol("k")}))


def depends_on(f, gen) -> bool:
    return f.diff(gen) != 0


# --- weight data in field form ---------------------------------------------------

@dataclass(frozen=True)
class _SectorData:
    hv: Fraction
    rho_tilde: tuple[Fraction, Fraction]
    shift_y: Fraction
    eps_sum: Fraction
    h_ch: Fraction
    h_ne: Fraction


@lru_cache(maxsize=None)
def _sector_data(A: AlgebraData, t: TwistAssignment) -> _SectorData:
    vs = vacuum_shifts(A, t)
    return _SectorData(dual_coxeter(A), twisted_rho(A, t).rho_tilde, natural_shift(A, t),
                       eps_sum(A, t), vs.h_ch, vs.h_ne)


def Lambda_y_field(A: AlgebraData):
    if A.rank == 1:
        # no Cartan direction orthogonal to theta
        return FIELD(0)
    return q_ / qq(A.q_scale * A.y_norm)


def lambda_nat_y(A: AlgebraData, t: TwistAssignment):
    return Lambda_y_field(A) + qq(_sector_data(A, t).shift_y)


def _pair_lambda(A: AlgebraData, lam, v) -> object:
    """(lambda|v) for lambda = (a, b) with field entries and v a rational pair."""
    return 2 * lam[0] * qq(v[0]) + qq(A.y_norm) * lam[1] * qq(v[1])


def _lambda(A: AlgebraData, t: TwistAssignment):
    return (t_ / 2, lambda_nat_y(A, t))


def affine_phi(A: AlgebraData, t: TwistAssignment, alpha, n, m, lam=None):
    """(lambda + rho_tilde|alpha) + m(k + h_dual) - n/2 (alpha|alpha)."""
    a = alpha.coords if isinstance(alpha, RootVec) else alpha
    sd = _sector_data(A, t)
    lam = _lambda(A, t) if lam is None else lam
    return (_pair_lambda(A, lam, a) + qq(bilinear(A, sd.rho_tilde, a))
            + qq(m) * (k_ + qq(sd.hv)) - qq(Fraction(n) / 2 * bilinear(A, a, a)))


def h_of_lambda_field(A: AlgebraData, t: TwistAssignment, lam=None):
    sd = _sector_data(A, t)
    lam = _lambda(A, t) if lam is None else lam
    rt2 = (2 * sd.rho_tilde[0], 2 * sd.rho_tilde[1])
    lam_lam = 2 * lam[0] * lam[0] + qq(A.y_norm) * lam[1] * lam[1]
    lam_rho = _pair_lambda(A, lam, rt2)
    hg = (lam_lam + lam_rho + k_ * qq(sd.eps_sum)) / (2 * (k_ + qq(sd.hv)))
    return hg + qq(sd.h_ch) + qq(sd.h_ne) - lam[0]


def factor_delta0(A: AlgebraData, t: TwistAssignment, beta: RootVec | tuple, n, m):
    if Fraction(n) <= 0:
        raise ValueError("n must be positive")
    if bilinear(A, beta, THETA) != 0:
        raise ValueError(f"{getattr(beta, 'label', beta)} is not in Delta_0")
    return affine_phi(A, t, beta, n, m)


def factor_delta_half(A: AlgebraData, t: TwistAssignment, alpha: RootVec | tuple, n, m):
    """Monic-in-h factor for alpha in Delta_1/2 or alpha = theta, via paired affine factors."""
    a = alpha.coords if isinstance(alpha, RootVec) else alpha
    at = bilinear(A, a, THETA)
    if at == 0:
        raise ValueError("root orthogonal to theta has an h-independent factor")
    half = at / 2
    bar = (-half, a[1])  # mirror root: natural part minus (alpha|theta)/2 theta
    sd = _sector_data(A, t)
    kk = k_ + qq(sd.hv)
    prod = affine_phi(A, t, a, n, Fraction(m) - half) * affine_phi(A, t, bar, n, Fraction(m) + half)
    N = -prod / (kk * qq(at * at))
    out = h_ + N - h_of_lambda_field(A, t)
    if out.diff(t_) != 0:
        raise DeterminantConsistencyError(f"{A.name}: factor for {a} still depends on (lambda|theta)")
    return out


def merged_half_root_factor(A: AlgebraData, t: TwistAssignment, n: int, m: int):
    """nu_{n,m} = N^theta_{n/2,m} = N^{theta/2}_{n,m/2}, defined when m - n - 2 eps(theta/2) is even."""
    th = next((r for r in A.positive_roots if is_theta_half(r)), None)
    if th is None:
        raise ValueError(f"{A.name} has no root theta/2")
    if (Fraction(m) - n - 2 * t.of(th)) % 2 != 0:
        raise ParityError(f"m - n - 2 eps = {Fraction(m) - n - 2 * t.of(th)} is not even")
    a = factor_delta_half(A, t, THETA, Fraction(n, 2), m)
    b = factor_delta_half(A, t, th, n, Fraction(m, 2))
    if a != b:
        raise DeterminantConsistencyError("theta and theta/2 forms of nu disagree")
    return a


# --- displayed closed forms -----------------------------------------------------

def _natural_pair(A: AlgebraData, u_y, v_y):
    return qq(A.y_norm) * u_y * v_y


def display_factor(A: AlgebraData, t: TwistAssignment, form: str, alpha: RootVec | tuple, n, m):
    """Closed forms as displayed for form in {'ns', 'ramond', 'general'}."""
    a = alpha.coords if isinstance(alpha, RootVec) else alpha
    w = weyl_vectors(A)
    hv = dual_coxeter(A)
    kk = k_ + qq(hv)
    Ly = Lambda_y_field(A)
    if form == "ns":
        lam_y, rho_y = Ly, qq(w.rho0[1])
    elif form == "ramond":
        lam_y, rho_y = Ly + qq(w.rho_half_nat[1]), qq(w.rho0[1])
    elif form == "general":
        sd = _sector_data(A, t)
        lam_y, rho_y = Ly + qq(sd.shift_y), qq(sd.rho_tilde[1])
    else:
        raise ValueError(form)
    n, m = Fraction(n), Fraction(m)
    at = bilinear(A, a, THETA)
    lin = _natural_pair(A, lam_y + rho_y, qq(a[1]))
    if at == 0:
        return lin + qq(m) * kk - qq(n / 2 * bilinear(A, a, a))
    if a == THETA:
        sq = (qq(m) * kk - qq(n)) ** 2
    else:
        sq = (2 * lin + 2 * qq(m) * kk - qq(n * bilinear(A, a, a))) ** 2
    quad = 2 * _natural_pair(A, lam_y, lam_y + 2 * rho_y)
    if form == "general":
        sd = _sector_data(A, t)
        rt_theta = bilinear(A, sd.rho_tilde, THETA)
        inner = sq + quad - (kk - qq(rt_theta)) ** 2 + 2 * k_ * qq(sd.eps_sum)
        return h_ - inner / (4 * kk) - qq(sd.h_ch) - qq(sd.h_ne)
    inner = sq + quad - (k_ + 1) ** 2
    out = h_ - inner / (4 * kk)
    if form == "ramond":
        out += qq(Fraction(hv - 2, 8))
    return out


def engine_factor(A: AlgebraData, t: TwistAssignment, alpha: RootVec | tuple, n, m):
    a = alpha.coords if isinstance(alpha, RootVec) else alpha
    if bilinear(A, a, THETA) == 0:
        return affine_phi(A, t, a, n, m)
    return factor_delta_half(A, t, a, n, m)


def general_consistency(A: AlgebraData, max_index: int = 2) -> Report:
    """Displayed general forms reduce to the NS and Ramond forms at the special twists."""
    rep = Report(f"general-twist reduction for {A.name}")
    g = minimal_gradation(A)
    roots = [("theta", THETA)] + [(r.label, r.coords) for r in g.delta_half] + \
            [(r.label, r.coords) for r in g.delta0]
    for sector in ("ns", "ramond"):
        t = make_sector(A, sector)
        bad = []
        total = 0
        for label, a in roots:
            for n in range(1, max_index + 1):
                for m2 in range(0, 2 * max_index + 1):
                    m = Fraction(m2, 2)
                    total += 1
                    gen = display_factor(A, t, "general", a, n, m)
                    spec = display_factor(A, t, sector, a, n, m)
                    if gen != spec:
                        bad.append((label, n, m))
        rep.add(f"{A.name}: general form at {sector} twist equals {sector} form",
                not bad, f"{total} factors" + (f", first mismatch {bad[0]}" if bad else ""))
    return rep


def derivation_consistency(A: AlgebraData, t: TwistAssignment, max_index: int = 2) -> Report:
    """Derivation-route factors equal the displayed general forms."""
    rep = Report(f"derivation vs display for {A.name} in {t.sector_label}")
    g = minimal_gradation(A)
    roots = [("theta", THETA)] + [(r.label, r.coords) for r in g.delta_half] + \
            [(r.label, r.coords) for r in g.delta0]
    bad, total = [], 0
    for label, a in roots:
        for n in range(1, max_index + 1):
            for m2 in range(0, 2 * max_index + 1):
                m = Fraction(m2, 2)
                total += 1
                if engine_factor(A, t, a, n, m) != display_factor(A, t, "general", a, n, m):
                    bad.append((label, n, m))
    rep.add(f"{A.name} {t.sector_label}: paired affine factors equal displayed forms",
            not bad, f"{total} factors" + (f", first mismatch {bad[0]}" if bad else ""))
    return rep


# --- fixtures -----------------------------------------------------------------

_FIX_LOCALS = {s: sympy.Symbol(s) for s in ("h", "q", "k", "eps", "sigma", "m", "n")}


def _fix(expr: str) -> sympy.Expr:
    return sympy.sympify(expr, locals=_FIX_LOCALS)


def _subs_params(e: sympy.Expr, params: dict) -> sympy.Expr:
    return e.subs({_FIX_LOCALS[p]: sympy.Rational(str(v)) for p, v in params.items() if p in _FIX_LOCALS})


def _index_set(spec: str, params: dict, limit: Fraction) -> list[Fraction]:
    if spec == "1":
        return [Fraction(1)]
    if spec == "N":
        start = Fraction(1)
    elif spec == "N0":
        start = Fraction(0)
    else:
        body = spec[: -len("+N0")] if spec.endswith("+N0") else spec
        start = Fraction(str(_subs_params(_fix(body), params)))
    out = []
    v = start
    while v <= limit:
        out.append(v)
        v += 1
    return out


def _parity_ok(fam: dict, n: Fraction, m: Fraction, params: dict) -> bool:
    if "parity" not in fam:
        return True
    val = Fraction(str(_subs_params(_fix(fam["parity"]), params)))
    return (m - n - val) % 2 == 0


def _fixture_root(A: AlgebraData, fam: dict) -> tuple:
    if fam["kind"] == "theta":
        return THETA
    r = A.root(fam["root"]).coords
    return vscale(fam.get("sign", 1), r)


def family_engine_factor(A: AlgebraData, t: TwistAssignment, fam: dict, n: Fraction, m: Fraction):
    a = _fixture_root(A, fam)
    ns = Fraction(fam.get("n_scale", "1"))
    ms = Fraction(fam.get("m_scale", "1"))
    sc = Fraction(fam.get("scale", "1"))
    return qq(sc) * engine_factor(A, t, a, n * ns, m * ms)


def family_fixture_factor(fam: dict, n: Fraction, m: Fraction, params: dict):
    e = _subs_params(_fix(fam["formula"]), params)
    e = e.subs({_FIX_LOCALS["n"]: sympy.Rational(n.numerator, n.denominator),
                _FIX_LOCALS["m"]: sympy.Rational(m.numerator, m.denominator)})
    return from_expr(e)


def closed_form_check(A: AlgebraData, sector: str, max_index: int = 3) -> Report:
    rep = Report(f"closed forms for {A.name} in {sector}")
    t = make_sector(A, sector)
    params = dict(A.fixture["display_params"][sector])
    for fam in A.fixture["families"]:
        bad, total = [], 0
        for n in _index_set(fam["n_set"], params, Fraction(max_index)):
            for m in _index_set(fam["m_set"], params, Fraction(max_index)):
                if not _parity_ok(fam, n, m, params):
                    continue
                total += 1
                if family_engine_factor(A, t, fam, n, m) != family_fixture_factor(fam, n, m, params):
                    bad.append((n, m))
        ok = total > 0 and not bad
        detail = f"{total} index pairs" + (f", mismatch at (n, m) = {bad[0]}" if bad else "")
        rep.add(f"{A.name} {sector}: {fam['name']}", ok, detail)
    return rep


# --- assembly -----------------------------------------------------------------

@dataclass(frozen=True)
class FactorPoly:
    value: object
    label: str
    kind: str  # 'theta', 'half', 'delta0'

    @property
    def carries_h(self) -> bool:
        return self.kind != "delta0"

    def expr(self) -> sympy.Expr:
        return to_expr(self.value)


@dataclass
class FactoredDeterminant:
    algebra: str
    sector: str
    weight_space: tuple[Fraction, Fraction]
    factors: list[tuple[FactorPoly, int]]
    prefactor_exponent: int
    h_dual: Fraction
    labels: dict = field(default_factory=dict)

    def h_degree(self) -> int:
        return sum(e for f, e in self.factors if f.carries_h)

    def value(self):
        out = (k_ + qq(self.h_dual)) ** self.prefactor_exponent
        for f, e in self.factors:
            out *= f.value ** e
        return out

    def expr(self) -> sympy.Expr:
        return to_expr(self.value())


def canonical(value, kind: str):
    """Normalize a factor: monic in h, or leading coefficient one in the order k, q, 1."""
    if kind != "delta0":
        c = value.diff(h_)
        return value / c
    for gen in (k_, q_):
        c = value.diff(gen)
        if c != 0:
            return value / c
    return value / value if value != 0 else value


@dataclass(frozen=True)
class _Family:
    kind: str
    root: tuple
    label: str
    start: Fraction
    strict: bool
    charge: Fraction
    odd: bool


def _families(A: AlgebraData, t: TwistAssignment) -> list[_Family]:
    g = minimal_gradation(A)
    plus_half = {r.key for r in g.delta_half_plus}
    fams = [_Family("theta", THETA, "theta", Fraction(0), True, Fraction(0), False)]
    for b in g.delta0_plus:
        fams.append(_Family("delta0", b.coords, b.label, t.of(b), False, A.charge(b.coords), b.odd))
        nb = -b
        fams.append(_Family("delta0", nb.coords, nb.label, t.of(nb), True, A.charge(nb.coords), b.odd))
    for a in g.delta_half:
        fams.append(_Family("half", a.coords, a.label, t.of(a) + Fraction(1, 2),
                            a.key not in plus_half, A.charge(a.coords), a.odd))
    return fams


def _lattice(start: Fraction, strict: bool, upto: Fraction) -> Iterator[Fraction]:
    m = start - math.floor(start)
    if strict and m == 0:
        m += 1
    while m <= upto:
        yield m
        m += 1


def _exponent_terms(A: AlgebraData, t: TwistAssignment, eta) -> Iterator[tuple[_Family, Fraction, Fraction, int]]:
    """(family, n, m, signed exponent) for every nonzero term at weight space eta."""
    charge, level = Fraction(eta[0]), Fraction(eta[1])
    pc = counter(A, t)
    reach = level_reach(positive_roots_W(A, t, max(level, Fraction(1))))
    for fam in _families(A, t):
        for m in _lattice(fam.start, fam.strict, level):
            n = 1
            while True:
                rest_level = level - n * m
                rest_charge = charge - n * fam.charge
                if rest_level < 0:
                    break
                if m == 0 and fam.charge > 0 and rest_charge < -reach * level:
                    break
                if m == 0 and fam.charge <= 0:
                    raise DeterminantConsistencyError("level-0 root with nonpositive charge")
                p = pc.count(rest_charge, rest_level)
                sign = -1 if (fam.odd and n % 2 == 0) else 1
                if p:
                    yield fam, Fraction(n), m, sign * p
                n += 1


def prefactor_exponent(A: AlgebraData, t: TwistAssignment, eta) -> int:
    charge, level = Fraction(eta[0]), Fraction(eta[1])
    pc = counter(A, t)
    total = 0
    for m in range(1, math.floor(level) + 1):
        for n in range(1, math.floor(level / m) + 1):
            total += pc.count(charge, level - m * n)
    return (A.rank - 1) * total


def _collect(entries: Iterable[tuple[object, str, str, int]]):
    acc: dict = {}
    meta: dict = {}
    for value, kind, label, e in entries:
        key = canonical(value, kind)
        acc[key] = acc.get(key, 0) + e
        meta.setdefault(key, (kind, label))
    return acc, meta


def assemble_determinant(A: AlgebraData, t: TwistAssignment, eta) -> FactoredDeterminant:
    eta = (Fraction(eta[0]), Fraction(eta[1]))
    entries = []
    for fam, n, m, e in _exponent_terms(A, t, eta):
        value = engine_factor(A, t, fam.root, n, m)
        entries.append((value, "delta0" if fam.kind == "delta0" else fam.kind,
                        f"N^{fam.label}_{{{n},{m}}}", e))
    acc, meta = _collect(entries)
    factors = []
    for key, e in acc.items():
        if e < 0:
            raise DeterminantConsistencyError(
                f"{A.name} {t.sector_label} at {eta}: negative exponent {e} for {meta[key][1]}")
        if e:
            kind, label = meta[key]
            factors.append((FactorPoly(key, label, kind), e))
    factors.sort(key=lambda fe: (fe[0].kind != "theta", fe[0].kind, fe[0].label, str(fe[0].value)))
    return FactoredDeterminant(A.name, t.sector_label, eta, factors,
                               prefactor_exponent(A, t, eta), dual_coxeter(A))


def closed_form_determinant(A: AlgebraData, sector: str, eta):
    """Determinant built purely from the per-algebra fixture factors and exponent rules."""
    t = make_sector(A, sector)
    params = dict(A.fixture["display_params"][sector])
    charge, level = Fraction(eta[0]), Fraction(eta[1])
    pc = counter(A, t)
    reach = level_reach(positive_roots_W(A, t, max(level, Fraction(1))))
    entries = []
    for fam in A.fixture["families"]:
        rule = fam.get("exponent")
        if rule is None:
            continue
        coef = int(rule.get("coef", 1))
        for m in _index_set(fam["m_set"], params, level * 2 + 2):
            n_values = [Fraction(1)] if fam["n_set"] == "1" else None
            n = Fraction(1)
            while True:
                if n_values is not None and n not in n_values:
                    break
                if not _parity_ok(fam, n, m, params):
                    n += 1
                    continue
                sub = {_FIX_LOCALS["n"]: sympy.Rational(str(n)), _FIX_LOCALS["m"]: sympy.Rational(str(m))}
                sc = Fraction(str(_subs_params(_fix(rule["shift"][0]), params).subs(sub)))
                sl = Fraction(str(_subs_params(_fix(rule["shift"][1]), params).subs(sub)))
                rest = (charge - sc, level - sl)
                if rest[1] < 0 or (sl == 0 and sc > 0 and rest[0] < -reach * level):
                    break
                if sl == 0 and sc <= 0:
                    raise DeterminantConsistencyError("fixture rule without a bound")
                if "exclude" in rule:
                    ec = Fraction(str(_subs_params(_fix(rule["exclude"][0]), params).subs(sub)))
                    el = Fraction(str(_subs_params(_fix(rule["exclude"][1]), params).subs(sub)))
                    # the excluded unit is the fermionic one when an even root shares the point
                    p = pc.count(rest[0], rest[1], exclude=(ec, el, "odd"))
                else:
                    p = pc.count(rest[0], rest[1])
                if p:
                    kind = "delta0" if fam["kind"] == "delta0" else "half"
                    entries.append((family_fixture_factor(fam, n, m, params), kind,
                                    f"{fam['name']}_{{{n},{m}}}", coef * p))
                n += 1
    acc, meta = _collect(entries)
    return {key: e for key, e in acc.items() if e}, prefactor_exponent(A, t, eta)


def compare_closed_form_determinant(A: AlgebraData, sector: str, max_level) -> Report:
    from .partitions import lattice_points
    rep = Report(f"fixture determinant rules for {A.name} in {sector}")
    t = make_sector(A, sector)
    bad, total = [], 0
    for charge, level in lattice_points(A, t, max_level):
        total += 1
        d = assemble_determinant(A, t, (charge, level))
        generic = {f.value: e for f, e in d.factors}
        fixed, pref = closed_form_determinant(A, sector, (charge, level))
        if generic != fixed or pref != d.prefactor_exponent:
            bad.append((charge, level))
    rep.add(f"{A.name} {sector}: fixture exponent rules reproduce the generic assembly up to level {max_level}",
            not bad, f"{total} weight spaces" + (f", first mismatch at {bad[0]}" if bad else ""))
    return rep


def format_factor(f: FactorPoly, k_value=None) -> str:
    """Readable form; h-carrying factors are printed as h plus an h-free remainder."""
    e = f.expr()
    if k_value is not None:
        e = e.subs(K_SYM, sympy.Rational(str(k_value)))
    e = sympy.cancel(e)
    if not f.carries_h:
        return str(sympy.expand(e))
    rest = sympy.factor(sympy.cancel(e - H_SYM))
    if rest == 0:
        return "h"
    text = str(rest)
    return f"h - {text[1:]}" if text.startswith("-") else f"h + {text}"
