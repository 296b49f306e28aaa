"""Brute-force Verma modules of the N=1 and N=2 superconformal algebras.

The mode algebras are written out by hand in the usual normalization:

    [L_m, L_n]     = (m - n) L_{m+n} + c/12 (m^3 - m) d_{m+n}
    [L_m, G_r]     = (m/2 - r) G_{m+r}                  (G, G+ and G-)
    {G_r, G_s}     = 2 L_{r+s} + c/3 (r^2 - 1/4) d_{r+s}
    [L_m, J_n]     = -n J_{m+n}
    [J_m, J_n]     = c/3 m d_{m+n}
    [J_m, G+-_r]   = +-G+-_{m+r}
    {G+_r, G-_s}   = 2 L_{r+s} + (r - s) J_{r+s} + c/3 (r^2 - 1/4) d_{r+s}

The anti-involution sends L_n, J_n, G_r to the opposite mode and swaps G+ and G-.
Gram matrices are built over QQ[h, q, c, g]; g is the eigenvalue of G_0 on the
N=1 Ramond highest-weight vector, reduced through g^2 = h - c/24.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import ring

from .catalog import dual_coxeter, load_algebra
from .determinant import (
    FIELD,
    H_SYM,
    K_SYM,
    Q_SYM,
    FactoredDeterminant,
    assemble_determinant,
    canonical,
    k_,
    qq,
)
from .partitions import partition_count
from .report import Report
from .twist import make_sector

RING, rh, rq, rc, rg = ring("h,q,c,g", QQ)
C_SYM, G_SYM = sympy.symbols("c g")

Op = tuple[str, Fraction]
Mono = tuple[Op, ...]

ALGEBRAS = {"N1": "osp(1|2)", "N2": "sl(2|1)"}
GENERATORS = {"N1": ("L", "G"), "N2": ("J", "L", "Gm", "Gp")}
ODD = {"G", "Gm", "Gp"}
# eta-hat charge carried by each generator; the state's J_0 eigenvalue is q - charge
CHARGE = {"L": 0, "J": 0, "G": 0, "Gp": -1, "Gm": 1}


class OracleError(AssertionError):
    pass


def _r(x) -> object:
    x = Fraction(x)
    return RING(QQ(x.numerator, x.denominator))


def central_charge_of_k(kind: str):
    """c(k) for the reduction of osp(1|2) and sl(2|1), as a field element in k."""
    if kind == "N1":
        return k_ / (k_ + qq(Fraction(3, 2))) - 6 * k_ - qq(Fraction(5, 2))
    return -6 * k_ - 3


@dataclass(frozen=True)
class ModeAlgebra:
    kind: str
    sector: str

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise ValueError(f"unknown mode algebra {self.kind!r}; use N1 or N2")
        if self.sector not in ("ns", "ramond"):
            raise ValueError(f"unknown sector {self.sector!r}; use ns or ramond")

    @property
    def generators(self) -> tuple[str, ...]:
        return GENERATORS[self.kind]

    def offset(self, name: str) -> Fraction:
        if name in ODD and self.sector == "ns":
            return Fraction(1, 2)
        return Fraction(0)

    def in_lattice(self, op: Op) -> bool:
        return (op[1] - self.offset(op[0])).denominator == 1

    def is_creation(self, op: Op) -> bool:
        name, n = op
        return n < 0 or (n == 0 and name == "Gm")

    def is_annihilation(self, op: Op) -> bool:
        name, n = op
        return n > 0 or (n == 0 and name == "Gp")

    def omega(self, op: Op) -> Op:
        name, n = op
        swap = {"Gp": "Gm", "Gm": "Gp"}
        return (swap.get(name, name), -n)

    def sort_key(self, op: Op):
        return (op[1], self.generators.index(op[0]))

    def bracket(self, a: Op, b: Op) -> list[tuple[object, Op | None]]:
        """Supercommutator [a, b} as (coefficient, mode) pairs; None marks the central term."""
        (x, m), (y, n) = a, b
        d = m + n == 0
        if x == "L":
            if y == "L":
                out = [(_r(m - n), ("L", m + n))]
                if d:
                    out.append((rc * _r((m ** 3 - m) / 12), None))
                return out
            if y in ODD:
                return [(_r(m / 2 - n), (y, m + n))]
            if y == "J":
                return [(_r(-n), ("J", m + n))]
        if x == "J":
            if y == "J":
                return [(rc * _r(m / 3), None)] if d else []
            if y == "L":
                return [(_r(m), ("J", m + n))]
            if y == "Gp":
                return [(_r(1), ("Gp", m + n))]
            if y == "Gm":
                return [(_r(-1), ("Gm", m + n))]
        if x in ODD and y in ("L", "J"):
            return [(-c, op) for c, op in self.bracket(b, a)]
        if x == "G" and y == "G":
            out = [(_r(2), ("L", m + n))]
            if d:
                out.append((rc * _r((m * m - Fraction(1, 4)) / 3), None))
            return out
        if {x, y} == {"Gp", "Gm"}:
            r, s = (m, n) if x == "Gp" else (n, m)
            out = [(_r(2), ("L", m + n)), (_r(r - s), ("J", m + n))]
            if d:
                out.append((rc * _r((r * r - Fraction(1, 4)) / 3), None))
            return out
        if x == y and x in ("Gp", "Gm"):
            return []
        raise OracleError(f"no relation for {a} and {b}")

    def modes(self, name: str, bound: Fraction) -> list[Op]:
        out = []
        n = self.offset(name) - int(bound) - 1
        while n <= bound:
            if -bound <= n:
                out.append((name, n))
            n += 1
        return out


def _lin_add(acc: dict, coef, op) -> None:
    acc[op] = acc.get(op, RING(0)) + coef
    if acc[op] == 0:
        del acc[op]


def _bracket_lin(A: ModeAlgebra, a: Op, lin: dict) -> dict:
    out: dict = {}
    for op, coef in lin.items():
        if op is None:
            continue
        for c, r in A.bracket(a, op):
            _lin_add(out, coef * c, r)
    return out


def _sign(a: Op, b: Op) -> int:
    return -1 if a[0] in ODD and b[0] in ODD else 1


def jacobi_check(A: ModeAlgebra, bound: Fraction = Fraction(2)) -> Report:
    """Super-Jacobi identity on all triples of modes with |mode| <= bound."""
    rep = Report(f"Jacobi identity for {A.kind} {A.sector}")
    ops = [op for name in A.generators for op in A.modes(name, bound)]
    bad = []
    for a in ops:
        for b in ops:
            for c in ops:
                # [a,[b,c}} = [[a,b},c} + (-1)^{|a||b|} [b,[a,c}}
                bc = {}
                for co, r in A.bracket(b, c):
                    _lin_add(bc, co, r)
                lhs = _bracket_lin(A, a, bc)
                ab = {}
                for co, r in A.bracket(a, b):
                    _lin_add(ab, co, r)
                rhs: dict = {}
                for op, co in ab.items():
                    if op is None:
                        continue
                    for c2, r in A.bracket(op, c):
                        _lin_add(rhs, co * c2, r)
                ac = {}
                for co, r in A.bracket(a, c):
                    _lin_add(ac, co, r)
                for op, co in _bracket_lin(A, b, ac).items():
                    _lin_add(rhs, co * _sign(a, b), op)
                if lhs != rhs:
                    bad.append((a, b, c))
    rep.add(f"{A.kind} {A.sector}: super-Jacobi identity on {len(ops)} modes", not bad,
            f"{len(ops) ** 3} triples" + (f", first failure {bad[0]}" if bad else ""))
    return rep


def anti_involution_check(A: ModeAlgebra, bound: Fraction = Fraction(3)) -> Report:
    """omega([a, b}) = [omega(b), omega(a)} on all pairs of modes."""
    rep = Report(f"anti-involution for {A.kind} {A.sector}")
    ops = [op for name in A.generators for op in A.modes(name, bound)]
    bad = []
    for a in ops:
        for b in ops:
            lhs: dict = {}
            for co, r in A.bracket(a, b):
                _lin_add(lhs, co, None if r is None else A.omega(r))
            rhs: dict = {}
            for co, r in A.bracket(A.omega(b), A.omega(a)):
                _lin_add(rhs, co, r)
            if lhs != rhs:
                bad.append((a, b))
    rep.add(f"{A.kind} {A.sector}: anti-involution reverses brackets", not bad,
            f"{len(ops) ** 2} pairs" + (f", first failure {bad[0]}" if bad else ""))
    return rep


class VermaModule:
    """Verma module with PBW monomials of creation modes acting on |h, q>."""

    def __init__(self, A: ModeAlgebra):
        self.A = A
        self._memo: dict = {}

    def _level(self, mono: Mono) -> Fraction:
        return -sum((op[1] for op in mono), Fraction(0))

    def _charge(self, mono: Mono) -> int:
        return sum(CHARGE[op[0]] for op in mono)

    def act(self, op: Op, mono: Mono) -> dict:
        key = (op, mono)
        if key not in self._memo:
            self._memo[key] = self._act(op, mono)
        return self._memo[key]

    def act_state(self, op: Op, state: dict) -> dict:
        out: dict = {}
        for mono, coef in state.items():
            for m2, c2 in self.act(op, mono).items():
                _lin_add(out, coef * c2, m2)
        return out

    def _zero(self, op: Op, mono: Mono) -> dict | None:
        name, n = op
        if n != 0:
            return None
        if name == "L":
            return {mono: rh + _r(self._level(mono))}
        if name == "J":
            return {mono: rq - self._charge(mono)}
        return None

    def _act(self, op: Op, mono: Mono) -> dict:
        A = self.A
        z = self._zero(op, mono)
        if z is not None:
            return z
        if not mono:
            if A.is_creation(op):
                return {(op,): RING(1)}
            if A.is_annihilation(op):
                return {}
            if op == ("G", Fraction(0)):
                return {(): rg}
            raise OracleError(f"unexpected mode {op}")
        x, rest = mono[0], mono[1:]
        if op == x and op[0] in ODD:
            # x x = 1/2 {x, x}
            out: dict = {}
            for co, r in A.bracket(op, op):
                part = {rest: RING(1)} if r is None else self.act(r, rest)
                for m3, c3 in part.items():
                    _lin_add(out, co * c3 / 2, m3)
            return out
        if A.is_creation(op):
            kx, ko = A.sort_key(x), A.sort_key(op)
            if ko < kx or (ko == kx and op[0] not in ODD):
                return {(op,) + mono: RING(1)}
        # op x rest = (-1)^{|op||x|} x (op rest) + [op, x} rest
        out: dict = {}
        inner = self.act(op, rest)
        s = _sign(op, x)
        for m2, c2 in inner.items():
            for m3, c3 in self.act(x, m2).items():
                _lin_add(out, s * c2 * c3, m3)
        for co, r in A.bracket(op, x):
            if r is None:
                _lin_add(out, co, rest)
            else:
                for m3, c3 in self.act(r, rest).items():
                    _lin_add(out, co * c3, m3)
        return out

    def creation_modes(self, level: Fraction) -> list[Op]:
        ops = [op for name in self.A.generators for op in self.A.modes(name, level)
               if self.A.is_creation(op)]
        return sorted(ops, key=self.A.sort_key)

    def basis(self, eta) -> list[Mono]:
        charge, level = Fraction(eta[0]), Fraction(eta[1])
        ops = self.creation_modes(level)
        out: list[Mono] = []

        def rec(i: int, mono: list, lev: Fraction, ch: int) -> None:
            if lev == level and ch == charge:
                out.append(tuple(mono))
            if i >= len(ops):
                return
            for j in range(i, len(ops)):
                op = ops[j]
                nl = lev - op[1]
                if nl > level:
                    continue
                if nl == lev and CHARGE[op[0]] <= 0:
                    continue
                nxt = j + 1 if op[0] in ODD else j
                if nl == lev and nxt == j:
                    continue
                rec(nxt, mono + [op], nl, ch + CHARGE[op[0]])

        rec(0, [], Fraction(0), 0)
        return out

    def gram_matrix(self, eta) -> tuple[list[Mono], list[list]]:
        basis = self.basis(eta)
        rows = []
        for bi in basis:
            row = []
            for bj in basis:
                state = {bj: RING(1)}
                # omega(x_1 ... x_k) = omega(x_k) ... omega(x_1): omega(x_1) acts first
                for x in bi:
                    state = self.act_state(self.A.omega(x), state)
                row.append(reduce_g(state.get((), RING(0))))
            rows.append(row)
        return basis, rows


def reduce_g(p):
    """Replace g^2 by h - c/24."""
    if p.degree(rg) < 2:
        return p
    g2 = rh - rc / 24
    out = RING(0)
    for monom, coef in p.terms():
        e = monom[3]
        out += RING({monom[:3] + (e % 2,): coef}) * g2 ** (e // 2)
    return out


@lru_cache(maxsize=None)
def verma(kind: str, sector: str) -> VermaModule:
    return VermaModule(ModeAlgebra(kind, sector))


@lru_cache(maxsize=None)
def _gram_determinant(kind: str, sector: str, eta):
    basis, rows = verma(kind, sector).gram_matrix(eta)
    if not basis:
        return RING(1)
    n = len(rows)
    # division-free Berkowitz: det(xI - M) has constant term (-1)^n det M
    d = reduce_g(DomainMatrix(rows, (n, n), RING.to_domain()).charpoly()[-1] * (-1) ** n)
    if d.degree(rg) > 0:
        raise OracleError(f"{kind} {sector} at {eta}: determinant keeps a g-odd part")
    return d


def gram_determinant(kind: str, sector: str, eta):
    return _gram_determinant(kind, sector, (Fraction(eta[0]), Fraction(eta[1])))


def oracle_to_field(p, kind: str):
    """Substitute c = c(k) and move into the determinant field."""
    c = central_charge_of_k(kind)
    by_c: dict[int, dict] = {}
    for (h_e, q_e, c_e, _), coef in p.terms():
        by_c.setdefault(c_e, {})[(h_e, q_e, 0, 0)] = coef
    out = FIELD(0)
    for c_e, terms in by_c.items():
        out += FIELD.new(FIELD.ring.from_dict(terms)) * c ** c_e
    return out


def _is_power_of(poly_expr, base_root: Fraction) -> bool:
    e = sympy.factor(poly_expr)
    _, factors = sympy.factor_list(e)
    for f, _mult in factors:
        if not f.has(K_SYM):
            continue
        if sympy.simplify(f.subs(K_SYM, -sympy.Rational(base_root.numerator, base_root.denominator))) != 0 \
                or sympy.degree(f, K_SYM) != 1:
            return False
    return True


@dataclass
class Comparison:
    kind: str
    sector: str
    eta: tuple
    dim: int
    matched: bool
    ratio: sympy.Expr
    detail: str


def compare_with_formula(kind: str, sector: str, eta) -> Comparison:
    eta = (Fraction(eta[0]), Fraction(eta[1]))
    A = load_algebra(ALGEBRAS[kind])
    t = make_sector(A, sector)
    V = verma(kind, sector)
    dim = len(V.basis(eta))
    p = partition_count(A, t, eta)
    if dim != p:
        return Comparison(kind, sector, eta, dim, False, sympy.nan,
                          f"basis size {dim} differs from partition count {p}")
    oracle = oracle_to_field(gram_determinant(kind, sector, eta), kind)
    formula = assemble_determinant(A, t, eta).value()
    if formula == 0 or oracle == 0:
        return Comparison(kind, sector, eta, dim, oracle == formula, sympy.nan, "degenerate")
    ratio = oracle / formula
    hv = dual_coxeter(A)
    ok = ratio.diff(FIELD.gens[0]) == 0 and ratio.diff(FIELD.gens[1]) == 0
    rex = sympy.factor(ratio.as_expr(H_SYM, Q_SYM, K_SYM, sympy.Symbol("t")))
    if ok:
        num, den = sympy.fraction(rex)
        ok = _is_power_of(num, hv) and _is_power_of(den, hv)
    detail = f"dim {dim}, ratio {rex}"
    return Comparison(kind, sector, eta, dim, ok, rex, detail)


def weight_spaces(kind: str, sector: str, max_level) -> list[tuple[Fraction, Fraction]]:
    V = verma(kind, sector)
    max_level = Fraction(max_level)
    step = Fraction(1, 2) if sector == "ns" else Fraction(1)
    out = []
    lev = Fraction(0)
    charges = [0] if kind == "N1" else list(range(-4, 5))
    while lev <= max_level:
        for ch in charges:
            if V.basis((ch, lev)):
                out.append((Fraction(ch), lev))
        lev += step
    return out


def compare_all(kind: str, sector: str, max_level) -> Report:
    rep = Report(f"Gram determinants for {kind} {sector} up to level {max_level}")
    for eta in weight_spaces(kind, sector, max_level):
        cmp = compare_with_formula(kind, sector, eta)
        rep.add(f"{kind} {sector} at (charge, level) = ({eta[0]}, {eta[1]})", cmp.matched, cmp.detail)
    return rep


def _solve_linear(f, gen):
    """Root of a factor linear in `gen`."""
    a = f.diff(gen)
    b = f - a * gen
    if a == 0 or a.diff(gen) != 0:
        return None
    return -b / a


def _const(f):
    """QQ value of a constant field element."""
    if not (f.numer.is_ground and f.denom.is_ground):
        raise OracleError(f"{f} is not constant")
    return QQ(f.numer.LC) / QQ(f.denom.LC)


def _q(x: Fraction):
    return QQ(x.numerator, x.denominator)


def vanishing_locus_check(kind: str, sector: str, eta, seed: int = 0, samples: int = 20) -> Report:
    """Each formula factor, set to zero at random (k, q), kills the Gram determinant."""
    eta = (Fraction(eta[0]), Fraction(eta[1]))
    A = load_algebra(ALGEBRAS[kind])
    t = make_sector(A, sector)
    rep = Report(f"vanishing locus for {kind} {sector} at {eta}")
    oracle = oracle_to_field(gram_determinant(kind, sector, eta), kind)
    det = assemble_determinant(A, t, eta)
    rng = random.Random(seed)
    hv = dual_coxeter(A)
    h, q, k = FIELD.gens[0], FIELD.gens[1], FIELD.gens[2]
    for f, _e in det.factors:
        bad = 0
        for _ in range(samples):
            kv = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            while kv == -hv:
                kv += 1
            qv = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            hv_ = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            if f.carries_h:
                root = _solve_linear(f.value.subs([(k, _q(kv)), (q, _q(qv))]), h)
                point = [(k, _q(kv)), (q, _q(qv)), (h, None if root is None else _const(root))]
            else:
                at = f.value.subs([(k, _q(kv))])
                if at.diff(q) == 0:
                    continue
                root = _solve_linear(at, q)
                point = [(k, _q(kv)), (q, None if root is None else _const(root)), (h, _q(hv_))]
            if root is None:
                bad += 1
                continue
            if oracle.subs(point) != 0:
                bad += 1
        rep.add(f"{kind} {sector} at ({eta[0]}, {eta[1]}): Gram det vanishes on {f.label} = 0",
                bad == 0, f"{samples} samples, {bad} nonzero")
    return rep
