"""Root data for the rank <= 2 simple Lie superalgebras and their minimal gradations.

Every root is stored as an exact pair ``(a, b)`` meaning ``a*theta + b*y`` in an
orthogonal basis with ``(theta|theta) = 2`` and ``(y|y) = y_norm``.  The sign of
``y_norm`` is the sign of the metric on the Cartan direction orthogonal to
``theta``; its magnitude is chosen per algebra so that every coordinate is
rational (``1/2`` for most entries, ``3/2`` for sl(3), ``1/6`` for G_2).

The grading element of the minimal gradation is ``x = theta/2``, so the grade of
a root is ``(alpha|theta)/2``.  The splitting of the grade-0 and grade-1/2 roots
into positive and negative halves is fixed by a frozen vector ``h0`` along
``y``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

from .report import Report

Vec = tuple[Fraction, Fraction]
ZERO: Vec = (Fraction(0), Fraction(0))
THETA: Vec = (Fraction(1), Fraction(0))

FIXTURE_ENV = "WKAC_FIXTURES"


class UnknownAlgebraError(KeyError):
    pass


class CatalogConsistencyError(AssertionError):
    pass


# --- vector helpers -------------------------------------------------------

def vec(a, b=0) -> Vec:
    return (Fraction(a), Fraction(b))


def vadd(*vs: Vec) -> Vec:
    return (sum((v[0] for v in vs), Fraction(0)), sum((v[1] for v in vs), Fraction(0)))


def vsub(u: Vec, v: Vec) -> Vec:
    return (u[0] - v[0], u[1] - v[1])


def vscale(c, v: Vec) -> Vec:
    c = Fraction(c)
    return (c * v[0], c * v[1])


def _frac(pair) -> Fraction:
    if isinstance(pair, (list, tuple)):
        return Fraction(int(pair[0]), int(pair[1]))
    return Fraction(str(pair))


def rat_json(x) -> dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


# --- types -----------------------------------------------------------------

@dataclass(frozen=True)
class RootVec:
    """One basis element of a root space.

    Degenerate root spaces (psl(2|2)) appear as several entries with equal
    ``coords`` told apart by ``charge_tag``; ``multiplicity`` records the
    dimension of the shared root space.
    """

    label: str
    coords: Vec
    parity: str
    charge_tag: int = 0
    multiplicity: int = 1

    @property
    def odd(self) -> bool:
        return self.parity == "odd"

    @property
    def sign(self) -> int:
        return -1 if self.odd else 1

    def __neg__(self) -> "RootVec":
        label = self.label[1:] if self.label.startswith("-") else "-" + self.label
        return RootVec(label, vscale(-1, self.coords), self.parity,
                       -self.charge_tag, self.multiplicity)

    @property
    def key(self) -> tuple[Vec, int]:
        return (self.coords, self.charge_tag)


@dataclass(frozen=True, eq=False)
class AlgebraData:
    name: str
    rank: int
    y_norm: Fraction
    roots: tuple[RootVec, ...]
    positive_roots: tuple[RootVec, ...]
    simple_roots: tuple[RootVec, ...]
    theta: RootVec
    even_dim: int
    odd_dim: int
    h_dual_stated: Fraction
    h0: Vec
    q_scale: Fraction
    central_charge_text: str
    fixture: Mapping[str, Any] = field(repr=False)

    @property
    def y_norm_sign(self) -> int:
        return 1 if self.y_norm > 0 else -1

    def root(self, label: str) -> RootVec:
        for r in self.roots:
            if r.label == label:
                return r
        raise KeyError(f"{self.name} has no root {label!r}")

    def find(self, coords: Vec, tag: int = 0) -> RootVec | None:
        for r in self.roots:
            if r.coords == coords and r.charge_tag == tag:
                return r
        return None

    @property
    def sdim(self) -> int:
        return self.even_dim - self.odd_dim

    def charge(self, v: Vec) -> Fraction:
        """Charge in units of the J_0 eigenvalue q: q_scale * (v|y)."""
        return self.q_scale * v[1] * self.y_norm


@dataclass(frozen=True)
class GradationData:
    delta0: tuple[RootVec, ...]
    delta_half: tuple[RootVec, ...]
    delta_minus_half: tuple[RootVec, ...]
    delta0_plus: tuple[RootVec, ...]
    delta_half_plus: tuple[RootVec, ...]
    delta_half_minus: tuple[RootVec, ...]
    h0_direction: Vec
    has_theta_half: bool


@dataclass(frozen=True)
class WeylVectors:
    rho: Vec
    rho0: Vec
    rho_half: Vec
    rho_half_nat: Vec


# --- loading ---------------------------------------------------------------

def _default_fixture_text() -> str:
    return resources.files("wkac").joinpath("data/catalog.json").read_text()


@lru_cache(maxsize=None)
def _load_raw(path: str | None) -> tuple[dict, ...]:
    if path is None:
        path = os.environ.get(FIXTURE_ENV) or None
    text = _default_fixture_text() if path is None else open(path).read()
    return tuple(json.loads(text)["algebras"])


def algebra_names(fixtures: str | None = None) -> list[str]:
    return [a["name"] for a in _load_raw(fixtures)]


def _build(raw: dict) -> AlgebraData:
    pos = []
    for r in raw["positive_roots"]:
        coords = (_frac(r["coords"][0]), _frac(r["coords"][1]))
        pos.append(RootVec(r["label"], coords, r["parity"], int(r.get("tag", 0)), int(r.get("mult", 1))))
    pos = tuple(pos)
    roots = pos + tuple(-r for r in pos)
    theta = next(r for r in pos if r.label == "theta")
    simple = tuple(next(r for r in pos if r.label == s) for s in raw["simple_roots"])
    h0 = (_frac(raw["h0"][0]), _frac(raw["h0"][1]))
    return AlgebraData(
        name=raw["name"], rank=int(raw["rank"]), y_norm=_frac(raw["y_norm"]),
        roots=roots, positive_roots=pos, simple_roots=simple, theta=theta,
        even_dim=int(raw["even_dim"]), odd_dim=int(raw["odd_dim"]),
        h_dual_stated=_frac(raw["h_dual"]), h0=h0, q_scale=_frac(raw["q_scale"]),
        central_charge_text=raw["central_charge"],
        fixture=MappingProxyType(raw),
    )


_ALIASES = {"g2": "G_2", "g_2": "G_2"}


def canonical_name(name: str, fixtures: str | None = None) -> str:
    names = algebra_names(fixtures)
    if name in names:
        return name
    folded = {n.lower().replace(" ", ""): n for n in names}
    key = name.lower().replace(" ", "")
    key = _ALIASES.get(key, key).lower()
    if key in folded:
        return folded[key]
    raise UnknownAlgebraError(f"unknown algebra {name!r}; valid names: {', '.join(names)}")


@lru_cache(maxsize=None)
def _load_algebra(name: str, fixtures: str | None) -> AlgebraData:
    for raw in _load_raw(fixtures):
        if raw["name"] == name:
            return _build(raw)
    raise UnknownAlgebraError(name)


def load_algebra(name: str | AlgebraData, fixtures: str | None = None) -> AlgebraData:
    if isinstance(name, AlgebraData):
        return name
    return _load_algebra(canonical_name(name, fixtures), fixtures)


def all_algebras(fixtures: str | None = None) -> list[AlgebraData]:
    return [load_algebra(n, fixtures) for n in algebra_names(fixtures)]


# --- form, grade, gradation ------------------------------------------------

def _coords(v: RootVec | Vec) -> Vec:
    return v.coords if isinstance(v, RootVec) else v


def bilinear(A: AlgebraData, alpha: RootVec | Vec, beta: RootVec | Vec) -> Fraction:
    a, b = _coords(alpha), _coords(beta)
    return 2 * a[0] * b[0] + A.y_norm * a[1] * b[1]


def natural(v: RootVec | Vec) -> Vec:
    """Projection orthogonal to theta."""
    c = _coords(v)
    return (Fraction(0), c[1])


def grade(A: AlgebraData, alpha: RootVec | Vec) -> Fraction:
    g = bilinear(A, alpha, THETA) / 2
    if g not in (-1, Fraction(-1, 2), 0, Fraction(1, 2), 1):
        raise CatalogConsistencyError(f"{A.name}: grade {g} out of range for {alpha}")
    return g


def h0_value(A: AlgebraData, alpha: RootVec | Vec) -> Fraction:
    return bilinear(A, alpha, A.h0)


@lru_cache(maxsize=None)
def minimal_gradation(A: AlgebraData) -> GradationData:
    half = Fraction(1, 2)
    d0 = tuple(r for r in A.roots if grade(A, r) == 0)
    dh = tuple(r for r in A.roots if grade(A, r) == half)
    dmh = tuple(r for r in A.roots if grade(A, r) == -half)
    d0p = tuple(r for r in d0 if h0_value(A, r) > 0)
    dhp = tuple(r for r in dh if h0_value(A, r) > 0)
    dhm = tuple(r for r in dh if h0_value(A, r) < 0)
    theta_half = any(r.coords == (half, 0) for r in dh)
    return GradationData(d0, dh, dmh, d0p, dhp, dhm, A.h0, theta_half)


def is_theta_half(r: RootVec | Vec) -> bool:
    return _coords(r) == (Fraction(1, 2), Fraction(0))


def _half_sum(roots: Iterable[RootVec]) -> Vec:
    return vscale(Fraction(1, 2), vadd(ZERO, *(vscale(r.sign, r.coords) for r in roots)))


@lru_cache(maxsize=None)
def weyl_vectors(A: AlgebraData) -> WeylVectors:
    g = minimal_gradation(A)
    rho = _half_sum(A.positive_roots)
    rho0 = _half_sum(g.delta0_plus)
    rho_half = _half_sum(g.delta_half_plus)
    return WeylVectors(rho, rho0, rho_half, natural(rho_half))


def dual_coxeter(A: AlgebraData) -> Fraction:
    hv = bilinear(A, weyl_vectors(A).rho, THETA) + 1
    if hv != A.h_dual_stated:
        raise CatalogConsistencyError(f"{A.name}: h_dual {hv} != stored {A.h_dual_stated}")
    return hv


def sdim_half(A: AlgebraData) -> int:
    return sum(r.sign for r in minimal_gradation(A).delta_half)


def distinct_roots(roots: Sequence[RootVec]) -> list[tuple[Vec, str, int]]:
    """Group entries sharing coordinates: (coords, parity, count of entries)."""
    out: dict[Vec, list] = {}
    for r in roots:
        slot = out.setdefault(r.coords, [r.parity, 0])
        slot[1] += 1
    return [(c, p, n) for c, (p, n) in out.items()]


def flipped_rho(A: AlgebraData) -> Vec:
    """Weyl vector of the positive system cut out by h0 + t*x for small t > 0."""
    g = minimal_gradation(A)
    flipped = list(g.delta0_plus) + list(g.delta_half_plus)
    flipped += [-r for r in g.delta_half_minus]
    flipped += [A.theta] + [r for r in g.delta_half if is_theta_half(r)]
    return _half_sum(flipped)


def structural_checks(A: AlgebraData) -> Report:
    rep = Report(f"structural identities for {A.name}")
    g = minimal_gradation(A)
    w = weyl_vectors(A)
    hv = dual_coxeter(A)
    sh = sdim_half(A)
    rep.add(f"{A.name}: sdim g_1/2 = 2h^v - 4", sh == 2 * hv - 4, f"{sh} vs {2 * hv - 4}")
    sigma = 1 if g.has_theta_half else 0
    rn = w.rho_half_nat
    R = 4 * bilinear(A, rn, vadd(rn, w.rho0)) - Fraction(3, 8) * sigma - hv * (hv - 2) / 2
    rep.add(f"{A.name}: R = 0", R == 0, f"R = {R}")
    rr = bilinear(A, w.rho, w.rho)
    rbar = flipped_rho(A)
    rb = bilinear(A, rbar, rbar)
    rep.add(f"{A.name}: (rho_bar|rho_bar) = (rho|rho)", rr == rb, f"{rb} vs {rr}")
    closed_rr = bilinear(A, w.rho0, w.rho0) + Fraction(1, 2) * (Fraction(sh, 2) + 1) ** 2
    rep.add(f"{A.name}: (rho|rho) split form", closed_rr == rr, f"{closed_rr} vs {rr}")
    v = vadd(w.rho0, vscale(2, rn))
    closed_rb = bilinear(A, v, v) + Fraction(1, 2) * (1 - Fraction(sigma, 2)) ** 2
    rep.add(f"{A.name}: (rho_bar|rho_bar) split form", closed_rb == rb, f"{closed_rb} vs {rb}")
    rep.add(f"{A.name}: R = (rho_bar|rho_bar) - (rho|rho)", R == rb - rr, f"{R} vs {rb - rr}")
    return rep


def check_catalog_invariants(A: AlgebraData) -> Report:
    """Data-level invariants: theta norm, negation, closure, dimensions, rho storage."""
    rep = Report(f"catalog invariants for {A.name}")
    rep.add("(theta|theta) = 2", bilinear(A, A.theta, A.theta) == 2)
    keys = {r.key for r in A.roots}
    rep.add("Delta = Delta+ u -Delta+", len(keys) == len(A.roots) == 2 * len(A.positive_roots))
    ok = True
    for a in A.roots:
        for b in A.roots:
            s = A.find(vadd(a.coords, b.coords), a.charge_tag + b.charge_tag)
            if s is not None and s.odd != (a.odd != b.odd):
                ok = False
    rep.add("parities add on root triples", ok)
    dim = A.rank + len(A.roots)
    rep.add("even_dim counts Cartan plus even roots",
            A.even_dim == A.rank + sum(1 for r in A.roots if not r.odd), f"{A.even_dim}")
    rep.add("odd_dim counts odd roots", A.odd_dim == sum(1 for r in A.roots if r.odd))
    sd = A.rank + sum(r.sign for r in A.roots)
    rep.add("sdim from roots", sd == A.sdim, f"{sd} vs {A.sdim} ({dim} generators)")
    mults_ok = all(n == next(r.multiplicity for r in A.roots if r.coords == c)
                   for c, _, n in distinct_roots(A.roots))
    rep.add("multiplicities match coinciding entries", mults_ok)
    rho = vscale(Fraction(1, 2), vadd(ZERO, *(vscale((-1 if p == "odd" else 1) * n, c)
                                            for c, p, n in distinct_roots(A.positive_roots))))
    rep.add("multiplicity-weighted rho equals entry sum", rho == weyl_vectors(A).rho)
    return rep


def algebra_to_json(A: AlgebraData) -> dict:
    w = weyl_vectors(A)
    g = minimal_gradation(A)
    return {
        "name": A.name,
        "rank": A.rank,
        "y_norm": rat_json(A.y_norm),
        "q_scale": rat_json(A.q_scale),
        "h_dual": rat_json(dual_coxeter(A)),
        "central_charge": A.central_charge_text,
        "roots": [
            {"label": r.label, "coords": [rat_json(r.coords[0]), rat_json(r.coords[1])],
             "parity": r.parity, "tag": r.charge_tag, "mult": r.multiplicity,
             "grade": rat_json(grade(A, r))}
            for r in A.roots
        ],
        "delta0_plus": [r.label for r in g.delta0_plus],
        "delta_half_plus": [r.label for r in g.delta_half_plus],
        "delta_half_minus": [r.label for r in g.delta_half_minus],
        "rho": [rat_json(x) for x in w.rho],
        "rho0": [rat_json(x) for x in w.rho0],
        "rho_half": [rat_json(x) for x in w.rho_half],
    }
