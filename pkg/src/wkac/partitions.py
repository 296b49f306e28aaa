"""Positive roots of the minimal W-algebra and their partition function.

Two independent counters are provided: a truncated bivariate power series and
a memoized recursion over the root list.  Charges are measured in units of the
J_0 eigenvalue q; levels are L_0 grades.
"""

from __future__ import annotations

import heapq
import math
import os
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import sympy

from .catalog import AlgebraData, is_theta_half, load_algebra, minimal_gradation
from .twist import TwistAssignment, make_sector
from .report import Report

DEFAULT_MAX_LEVEL = 6


def default_max_level() -> Fraction:
    return Fraction(os.environ.get("WKAC_MAX_LEVEL", DEFAULT_MAX_LEVEL))


class RootNotInSystemError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class WRoot:
    level: Fraction
    charge: Fraction
    parity: str
    multiplicity: int = 1

    @property
    def odd(self) -> bool:
        return self.parity == "odd"

    @property
    def point(self) -> tuple[Fraction, Fraction]:
        return (self.charge, self.level)


def _levels(start: Fraction, strict: bool, cutoff: Fraction) -> Iterable[Fraction]:
    """Elements of start + Z that are >= 0 (or > 0) and <= cutoff."""
    m = start - math.floor(start)
    if strict and m == 0:
        m += 1
    while m <= cutoff:
        yield m
        m += 1


def positive_roots_W(A: AlgebraData, t: TwistAssignment, level_cutoff) -> list[WRoot]:
    cutoff = Fraction(level_cutoff)
    g = minimal_gradation(A)
    plus_half = {r.key for r in g.delta_half_plus}
    counts: dict[tuple, int] = defaultdict(int)
    for b in g.delta0_plus:
        for m in _levels(t.of(b), False, cutoff):
            counts[(m, A.charge(b.coords), b.parity)] += 1
        for m in _levels(t.of(-b), True, cutoff):
            counts[(m, -A.charge(b.coords), b.parity)] += 1
    for a in g.delta_half:
        start = t.of(a) + Fraction(1, 2)
        for m in _levels(start, a.key not in plus_half, cutoff):
            counts[(m, A.charge(a.coords), a.parity)] += 1
    for m in _levels(Fraction(0), True, cutoff):
        counts[(m, Fraction(0), "even")] += A.rank
    return sorted(WRoot(m, c, p, n) for (m, c, p), n in counts.items())


# --- truncated series ---------------------------------------------------------

@dataclass
class GradedSeries:
    """sum c_ij x^(i/D1) y^(j/D2), truncated at level <= truncation and charge <= charge_cap."""

    charge_denom: int
    level_denom: int
    truncation: Fraction
    charge_cap: Fraction | None
    coeffs: dict[tuple[int, int], int]

    def coefficient(self, charge, level) -> int:
        i = Fraction(charge) * self.charge_denom
        j = Fraction(level) * self.level_denom
        if i.denominator != 1 or j.denominator != 1:
            return 0
        return self.coeffs.get((int(i), int(j)), 0)

    def points(self):
        for (i, j), c in sorted(self.coeffs.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            yield Fraction(i, self.charge_denom), Fraction(j, self.level_denom), c

    def _jmax(self) -> int:
        return int(self.truncation * self.level_denom)

    def _imax(self) -> int | None:
        return None if self.charge_cap is None else math.floor(self.charge_cap * self.charge_denom)

    def mul_factor(self, di: int, dj: int, odd: bool, power: int, inverse: bool = False) -> None:
        """Multiply in place by (1 + t)^power (odd) or (1 - t)^-power (even), t = x^di y^dj.

        With inverse=True the reciprocal of that factor is used instead.
        """
        for _ in range(power):
            if odd != inverse:
                self._mul_binomial(di, dj, 1 if not inverse else -1)
            else:
                self._mul_geometric(di, dj, 1 if not inverse else -1)
        self._prune()

    def _mul_binomial(self, di, dj, sign):
        # times (1 + sign*t) for sign=+1; times (1 - t) for sign=-1
        new = dict(self.coeffs)
        for (i, j), c in self.coeffs.items():
            key = (i + di, j + dj)
            new[key] = new.get(key, 0) + sign * c
        self.coeffs = new

    def _mul_geometric(self, di, dj, sign):
        # times 1/(1 - t) for sign=+1, 1/(1 + t) for sign=-1: out(p) = in(p) + sign*out(p - d)
        if dj < 0 or (dj == 0 and di <= 0):
            raise ValueError("geometric factor needs positive level or positive charge")
        jmax, imax = self._jmax(), self._imax()
        pending = dict(self.coeffs)
        heap = [(j, i) for (i, j) in pending]
        heapq.heapify(heap)
        out = {}
        while heap:
            j, i = heapq.heappop(heap)
            if (i, j) in out:
                continue
            val = pending[(i, j)]
            out[(i, j)] = val
            nxt = (i + di, j + dj)
            if val == 0 or nxt[1] > jmax or (imax is not None and nxt[0] > imax):
                continue
            if nxt not in pending:
                heapq.heappush(heap, (nxt[1], nxt[0]))
            pending[nxt] = pending.get(nxt, 0) + sign * val
        self.coeffs = {k: v for k, v in out.items() if v}

    def _prune(self) -> None:
        jmax, imax = self._jmax(), self._imax()
        self.coeffs = {(i, j): c for (i, j), c in self.coeffs.items()
                       if c and j <= jmax and (imax is None or i <= imax)}


def _lcm_denoms(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def level_reach(roots: list[WRoot]) -> Fraction:
    """Largest value of -charge/level over positive-level roots (at least 0)."""
    return max([Fraction(0)] + [-r.charge / r.level for r in roots if r.level > 0])


def charge_cap_for(roots: list[WRoot], level: Fraction) -> Fraction:
    """Highest charge reachable using only positive-level roots up to the given level."""
    ratio = max([Fraction(0)] + [r.charge / r.level for r in roots if r.level > 0])
    return ratio * level


def _series_from_roots(roots: list[WRoot], truncation: Fraction, charge_cap: Fraction | None,
                       extra_denoms: Iterable[Fraction] = ()) -> GradedSeries:
    d1 = _lcm_denoms([r.charge for r in roots] + [charge_cap or 0] + list(extra_denoms))
    d2 = _lcm_denoms([r.level for r in roots] + [truncation] + list(extra_denoms))
    s = GradedSeries(d1, d2, truncation, charge_cap, {(0, 0): 1})
    # positive-level roots first: finite in every direction below the truncation
    for r in sorted(roots, key=lambda r: (r.level == 0, r.level, r.charge)):
        if r.level > truncation:
            continue
        s.mul_factor(int(r.charge * d1), int(r.level * d2), r.odd, r.multiplicity)
    return s


def _target(root) -> tuple[tuple[Fraction, Fraction], str | None]:
    """(point, parity) of an exclusion target: a WRoot, (charge, level) or (charge, level, parity)."""
    if isinstance(root, WRoot):
        return root.point, root.parity
    parity = root[2] if len(root) > 2 else None
    return (Fraction(root[0]), Fraction(root[1])), parity


def _remove_one(roots: list[WRoot], root) -> list[WRoot]:
    point, parity = _target(root)
    out, done = [], False
    for r in roots:
        if not done and r.point == point and parity in (None, r.parity):
            done = True
            if r.multiplicity > 1:
                out.append(WRoot(r.level, r.charge, r.parity, r.multiplicity - 1))
            continue
        out.append(r)
    if not done:
        raise RootNotInSystemError(f"({point[0]}, {point[1]}) is not a positive W-root here")
    return out


def partition_series(A: AlgebraData, t: TwistAssignment, level_cutoff=None,
                     charge_cap=None, exclude=None) -> GradedSeries:
    """Product over the W-roots; with `exclude`, one multiplicity unit of that root is left out."""
    cutoff = default_max_level() if level_cutoff is None else Fraction(level_cutoff)
    roots = positive_roots_W(A, t, cutoff)
    if charge_cap is None and any(r.level == 0 and not r.odd for r in roots):
        charge_cap = charge_cap_for(roots, cutoff)
    if exclude is not None:
        roots = _remove_one(roots, exclude)
    return _series_from_roots(roots, cutoff, None if charge_cap is None else Fraction(charge_cap))


def generating_function_series(A: AlgebraData, params: dict, level_cutoff, charge_cap=None) -> GradedSeries:
    """Series of the stored product formula prod_l (1 +- x^c y^(l+offset))^power."""
    cutoff = Fraction(level_cutoff)
    subs = {sympy.Symbol(k): sympy.Rational(str(v)) for k, v in params.items()}
    roots = []
    for f in A.fixture["generating_function"]:
        c = Fraction(str(sympy.sympify(f["charge"]).subs(subs)))
        off = Fraction(str(sympy.sympify(f["offset"]).subs(subs)))
        l = 1
        while l + off <= cutoff:
            if l + off >= 0:
                roots.append(WRoot(l + off, c, f["parity"], int(f.get("power", 1))))
            l += 1
    if charge_cap is None and any(r.level == 0 and not r.odd for r in roots):
        charge_cap = charge_cap_for(roots, cutoff)
    return _series_from_roots(roots, cutoff, None if charge_cap is None else Fraction(charge_cap))


# --- recursive counter ----------------------------------------------------------

class PartitionCounter:
    """Exact partition counts by memoized recursion over the W-root list.

    Odd roots are used at most `multiplicity` times, even roots any number of times.
    """

    def __init__(self, A: AlgebraData, t: TwistAssignment, level_cutoff=None):
        self.A, self.t = A, t
        self.cutoff = default_max_level() if level_cutoff is None else Fraction(level_cutoff)
        self._build(self.cutoff)

    def _build(self, cutoff: Fraction) -> None:
        self.cutoff = cutoff
        self.roots = positive_roots_W(self.A, self.t, cutoff)
        # positive levels first, level-0 roots (all of positive charge) last
        # multiplicities become distinct copies: (1 + t)^2 has two ways to use t once
        copies = [WRoot(r.level, r.charge, r.parity, 1) for r in self.roots for _ in range(r.multiplicity)]
        self.order = sorted(copies, key=lambda r: (r.level == 0, -r.level, r.charge))
        self.first_zero = next((i for i, r in enumerate(self.order) if r.level == 0), len(self.order))
        self._memo: dict = {}

    def _ensure(self, level: Fraction) -> None:
        if level > self.cutoff:
            new = self.cutoff
            while new < level:
                new *= 2
            self._build(new)

    def count(self, charge, level, exclude: WRoot | tuple | None = None) -> int:
        charge, level = Fraction(charge), Fraction(level)
        if level < 0:
            return 0
        self._ensure(level)
        ex = None
        if exclude is not None:
            ex = self._match(exclude)
        return self._rec(0, charge, level, ex)

    def _match(self, root) -> int:
        point, parity = _target(root)
        for i, r in enumerate(self.order):
            if r.point == point and parity in (None, r.parity):
                return i
        raise RootNotInSystemError(f"({point[0]}, {point[1]}) is not a positive W-root here")

    def _rec(self, i: int, charge: Fraction, level: Fraction, ex: int | None) -> int:
        if level == 0 and charge == 0:
            return 1
        if i >= len(self.order):
            return 0
        if i >= self.first_zero and (level != 0 or charge < 0):
            return 0
        key = (i, charge, level, ex)
        if key in self._memo:
            return self._memo[key]
        r = self.order[i]
        if ex == i:
            # the excluded copy contributes nothing
            result = self._rec(i + 1, charge, level, ex)
            self._memo[key] = result
            return result
        cap = 1 if r.odd else None
        total, used = 0, 0
        c, l = charge, level
        while True:
            if l < 0 or (r.level == 0 and c < 0):
                break
            total += self._rec(i + 1, c, l, ex)
            used += 1
            if cap is not None and used > cap:
                break
            c -= r.charge
            l -= r.level
            if r.level == 0 and r.charge <= 0:
                break
        self._memo[key] = total
        return total


@lru_cache(maxsize=None)
def counter(A: AlgebraData, t: TwistAssignment) -> PartitionCounter:
    return PartitionCounter(A, t)


def partition_count(A: AlgebraData, t: TwistAssignment, eta) -> int:
    return counter(A, t).count(eta[0], eta[1])


def partition_excluding(A: AlgebraData, t: TwistAssignment, root, eta) -> int:
    return counter(A, t).count(eta[0], eta[1], exclude=root)


def lattice_points(A: AlgebraData, t: TwistAssignment, level_cutoff) -> list[tuple[Fraction, Fraction]]:
    """All (charge, level) with level <= cutoff and charge within the exact window of the series."""
    s = partition_series(A, t, level_cutoff)
    pts = {(c, l) for c, l, _ in s.points()}
    return sorted(pts, key=lambda p: (p[1], p[0]))


def positive_level_only_series(A: AlgebraData, t: TwistAssignment, level_cutoff) -> GradedSeries:
    roots = [r for r in positive_roots_W(A, t, level_cutoff) if r.level > 0]
    return _series_from_roots(roots, Fraction(level_cutoff), None)


def format_product(A: AlgebraData, t: TwistAssignment, level_cutoff) -> str:
    """The generating product as a string, one factor per W-root."""
    parts = []
    for r in positive_roots_W(A, t, level_cutoff):
        mono = f"x^({r.charge}) y^({r.level})"
        base = f"(1 + {mono})" if r.odd else f"(1 - {mono})^-1"
        parts.append(base if r.multiplicity == 1 else f"{base}^{r.multiplicity}" if r.odd
                     else f"(1 - {mono})^-{r.multiplicity}")
    return " * ".join(parts)


def has_theta_half(A: AlgebraData) -> bool:
    return any(is_theta_half(r) for r in A.roots)


def dual_method_report(A: AlgebraData, t: TwistAssignment, max_level) -> Report:
    """Series coefficients against the recursive count on every lattice point up to max_level."""
    rep = Report(f"partition methods for {A.name} in {t.sector_label}")
    s = partition_series(A, t, max_level)
    pc = PartitionCounter(A, t, max_level)
    pts = lattice_points(A, t, max_level)
    bad = [p for p in pts if s.coefficient(*p) != pc.count(*p)]
    rep.add(f"{A.name} {t.sector_label}: series equals recursive count up to level {max_level}",
            not bad, f"{len(pts)} lattice points" + (f", first mismatch at {bad[0]}" if bad else ""))
    return rep
