"""Weight map (lambda, k) -> (Lambda, h) and the central charge of the minimal W-algebra.

Numbers are exact: Fractions where possible, sympy rational functions once the
level k (or a weight coordinate) is symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import sympy

from .catalog import (
    THETA,
    AlgebraData,
    bilinear,
    dual_coxeter,
    minimal_gradation,
    sdim_half,
    is_theta_half,
)
from .twist import TwistAssignment, twisted_rho

K = sympy.Symbol("k")
Scalar = Union[Fraction, int, sympy.Expr]


class CriticalLevelError(ZeroDivisionError):
    pass


def S(x) -> sympy.Expr:
    """Exact sympy number from int, Fraction or sympy input."""
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    return sympy.sympify(x)


def _check_level(A: AlgebraData, k) -> None:
    kk = S(k)
    if kk.is_number and kk == -S(dual_coxeter(A)):
        raise CriticalLevelError(f"{A.name}: critical level k = -h_dual = {-dual_coxeter(A)}")


@dataclass(frozen=True)
class AffineWeight:
    lambda_theta: Scalar
    lambda_y: Scalar
    k: Scalar = K

    def natural(self):
        return (0, self.lambda_y)

    def full(self):
        # lambda = lambda_nat + (lambda|theta)/2 * theta
        return (S(self.lambda_theta) / 2, S(self.lambda_y))


@dataclass(frozen=True)
class WWeight:
    Lambda_y: sympy.Expr
    h: sympy.Expr

    def q(self, A: AlgebraData) -> sympy.Expr:
        return q_of_Lambda(A, self.Lambda_y)


@dataclass(frozen=True)
class VacuumShifts:
    h_ch: Fraction
    h_ne: Fraction
    kappa: Mapping[str, int]


def theta_step(x: Fraction) -> Fraction:
    if x > 0:
        return Fraction(1)
    if x == 0:
        return Fraction(1, 2)
    return Fraction(0)


def kappa(A: AlgebraData, t: TwistAssignment) -> dict[str, int]:
    g = minimal_gradation(A)
    plus = {r.label for r in g.delta_half_plus}
    out = {}
    for r in g.delta_half:
        e = t.of(r)
        if e < Fraction(1, 2):
            out[r.label] = 0
        elif e > Fraction(1, 2):
            out[r.label] = 1
        else:
            # theta/2 has no natural part, so its value never enters Lambda
            out[r.label] = 1 if r.label in plus else 0
    return out


def vacuum_shifts(A: AlgebraData, t: TwistAssignment) -> VacuumShifts:
    g = minimal_gradation(A)
    h_ch = Fraction(1, 2) * sum((r.sign * t.of(r) ** 2 for r in g.delta_half), Fraction(0))
    h_ne = Fraction(-1, 4) * sum(
        (r.sign * (t.of(r) - 1) * (t.of(r) - 2 * theta_step(t.of(r) - Fraction(1, 2)))
         for r in g.delta_half), Fraction(0))
    return VacuumShifts(h_ch, h_ne, kappa(A, t))


def natural_shift(A: AlgebraData, t: TwistAssignment) -> Fraction:
    """y-coordinate of lambda_nat - Lambda."""
    kap = kappa(A, t)
    g = minimal_gradation(A)
    return Fraction(1, 2) * sum((r.sign * (t.of(r) + kap[r.label]) * r.coords[1]
                                 for r in g.delta_half), Fraction(0))


def eps_sum(A: AlgebraData, t: TwistAssignment) -> Fraction:
    """Sum over positive roots of (-1)^p eps (1 - eps)."""
    return sum((r.sign * t.of(r) * (1 - t.of(r)) for r in A.positive_roots), Fraction(0))


def q_of_Lambda(A: AlgebraData, Lambda_y) -> sympy.Expr:
    return S(A.q_scale) * S(A.y_norm) * S(Lambda_y)


def Lambda_of_q(A: AlgebraData, q) -> sympy.Expr:
    return S(q) / (S(A.q_scale) * S(A.y_norm))


def _pair(A: AlgebraData, u, v) -> sympy.Expr:
    return 2 * S(u[0]) * S(v[0]) + S(A.y_norm) * S(u[1]) * S(v[1])


def h_of_lambda(A: AlgebraData, t: TwistAssignment, lam, k=K) -> sympy.Expr:
    """h = h^g + h^ch + h^ne - (lambda|theta)/2 for lambda given as (a, b) = a theta + b y."""
    _check_level(A, k)
    k = S(k)
    hv = S(dual_coxeter(A))
    rt = twisted_rho(A, t).rho_tilde
    two_rt = (2 * S(rt[0]), 2 * S(rt[1]))
    lam = (S(lam[0]), S(lam[1]))
    hg = (_pair(A, lam, (lam[0] + two_rt[0], lam[1] + two_rt[1])) + k * S(eps_sum(A, t))) / (2 * (k + hv))
    vs = vacuum_shifts(A, t)
    return hg + S(vs.h_ch) + S(vs.h_ne) - _pair(A, lam, THETA) / 2


def lambda_to_weights(A: AlgebraData, t: TwistAssignment, w: AffineWeight) -> WWeight:
    lam = w.full()
    Lambda_y = S(w.lambda_y) - S(natural_shift(A, t))
    h = sympy.cancel(sympy.together(h_of_lambda(A, t, lam, w.k)))
    return WWeight(sympy.nsimplify(Lambda_y), h)


def central_charge(A: AlgebraData, k=K) -> sympy.Expr:
    _check_level(A, k)
    k = S(k)
    hv = S(dual_coxeter(A))
    c = k * A.sdim / (k + hv) - 6 * k + sympy.Rational(sdim_half(A), 2) - 2
    return sympy.cancel(c)


def central_charge_fixture(A: AlgebraData, k=K) -> sympy.Expr:
    return sympy.sympify(A.central_charge_text, locals={"k": K}).subs(K, S(k))


def central_charge_matches(A: AlgebraData) -> bool:
    return sympy.cancel(central_charge(A) - central_charge_fixture(A)) == 0


def ns_closed_form_h(A: AlgebraData, lam, k=K) -> sympy.Expr:
    from .catalog import weyl_vectors
    rho = weyl_vectors(A).rho
    lam = (S(lam[0]), S(lam[1]))
    two_rho = (lam[0] + 2 * S(rho[0]), lam[1] + 2 * S(rho[1]))
    return _pair(A, lam, two_rho) / (2 * (S(k) + S(dual_coxeter(A)))) - _pair(A, lam, THETA) / 2


def ramond_closed_form(A: AlgebraData, lam, k=K) -> tuple[sympy.Expr, sympy.Expr]:
    """(Lambda_y, h) from the Ramond closed forms with rho_0 and sdim g_1/2."""
    from .catalog import weyl_vectors
    w = weyl_vectors(A)
    k = S(k)
    hv = S(dual_coxeter(A))
    lam = (S(lam[0]), S(lam[1]))
    two_rho0 = (lam[0] + 2 * S(w.rho0[0]), lam[1] + 2 * S(w.rho0[1]))
    lt = _pair(A, lam, THETA)
    h = (_pair(A, lam, two_rho0) / (2 * (k + hv))
         + sdim_half(A) * (sympy.Rational(1, 16) + k / (8 * (k + hv)))
         - lt * (k + hv - 1) / (2 * (k + hv)))
    return lam[1] - S(w.rho_half_nat[1]), h


def theta_half_present(A: AlgebraData) -> bool:
    return any(is_theta_half(r) for r in A.roots)
