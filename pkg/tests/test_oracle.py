from fractions import Fraction as F

import pytest
import sympy

from wkac.catalog import load_algebra
from wkac.determinant import assemble_determinant
from wkac.oracle import (
    RING,
    ModeAlgebra,
    anti_involution_check,
    central_charge_of_k,
    compare_all,
    compare_with_formula,
    gram_determinant,
    jacobi_check,
    reduce_g,
    vanishing_locus_check,
    verma,
    weight_spaces,
)
from wkac.partitions import partition_count
from wkac.twist import make_sector
from wkac.weights import central_charge

h, q, c, g = RING.gens
half = F(1, 2)


def _det2(m):
    return reduce_g(m[0][0] * m[1][1] - m[0][1] * m[1][0])


def _gram(kind, sector, eta):
    return verma(kind, sector).gram_matrix(eta)


def test_n1_ns_first_levels():
    basis, m = _gram("N1", "ns", (0, half))
    assert basis == [(("G", -half),)] and m == [[2 * h]]
    basis, m = _gram("N1", "ns", (0, 1))
    assert basis == [(("L", F(-1)),)] and m == [[2 * h]]


def test_n1_ns_level_three_halves():
    basis, m = _gram("N1", "ns", (0, F(3, 2)))
    assert len(basis) == 2
    # hand computation in the basis G_{-3/2}, L_{-1} G_{-1/2}
    want = 2 * h * (4 * h ** 2 + (4 * c / 3 - 6) * h + 2 * c / 3)
    assert _det2(m) == want
    assert gram_determinant("N1", "ns", (0, F(3, 2))) == want


def test_n1_ramond_level_one():
    basis, m = _gram("N1", "ramond", (0, 1))
    assert set(basis) == {(("L", F(-1)),), (("G", F(-1)),)}
    L = basis.index((("L", F(-1)),))
    G = 1 - L
    assert m[L][L] == 2 * h
    assert m[G][G] == 2 * h + c / 4
    assert m[L][G] == m[G][L] == 3 * g / 2
    assert gram_determinant("N1", "ramond", (0, 1)) == 4 * h ** 2 + h * c / 2 - 9 * h / 4 + 3 * c / 32


def test_n1_ramond_level_zero_is_trivial():
    assert verma("N1", "ramond").basis((0, 0)) == [()]
    assert gram_determinant("N1", "ramond", (0, 0)) == 1


def test_n2_ramond_zero_mode():
    basis, m = _gram("N2", "ramond", (1, 0))
    assert basis == [(("Gm", F(0)),)]
    assert m == [[2 * h - c / 12]]
    assert verma("N2", "ramond").basis((-1, 0)) == []


def test_n2_ns_level_half():
    assert _gram("N2", "ns", (1, half)) == ([(("Gm", -half),)], [[2 * h + q]])
    assert _gram("N2", "ns", (-1, half)) == ([(("Gp", -half),)], [[2 * h - q]])


def test_gram_is_symmetric():
    for kind, sector, eta in [("N1", "ns", (0, 2)), ("N1", "ramond", (0, 2)),
                              ("N2", "ns", (0, 1)), ("N2", "ramond", (0, 1))]:
        _, m = _gram(kind, sector, eta)
        assert all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(len(m)))


@pytest.mark.parametrize("kind,name", [("N1", "osp(1|2)"), ("N2", "sl(2|1)")])
@pytest.mark.parametrize("sector", ["ns", "ramond"])
def test_basis_size_is_partition_count(kind, name, sector):
    A = load_algebra(name)
    t = make_sector(A, sector)
    for eta in weight_spaces(kind, sector, 3 if kind == "N1" else 2):
        assert len(verma(kind, sector).basis(eta)) == partition_count(A, t, eta), eta


@pytest.mark.parametrize("kind", ["N1", "N2"])
@pytest.mark.parametrize("sector", ["ns", "ramond"])
def test_mode_algebra_consistency(kind, sector):
    A = ModeAlgebra(kind, sector)
    assert jacobi_check(A, F(4)).passed
    assert anti_involution_check(A).passed


@pytest.mark.parametrize("kind,name", [("N1", "osp(1|2)"), ("N2", "sl(2|1)")])
@pytest.mark.parametrize("sector", ["ns", "ramond"])
def test_h_degree_matches_formula(kind, name, sector):
    A = load_algebra(name)
    t = make_sector(A, sector)
    for eta in weight_spaces(kind, sector, F(3, 2)):
        assert gram_determinant(kind, sector, eta).degree(h) == assemble_determinant(A, t, eta).h_degree(), eta


def test_n1_ramond_is_even_in_g():
    for level in range(4):
        assert gram_determinant("N1", "ramond", (0, level)).degree(g) == 0


def test_mode_algebra_rejects_unknown():
    with pytest.raises(ValueError):
        ModeAlgebra("N3", "ns")
    with pytest.raises(ValueError):
        ModeAlgebra("N1", "twisted")


def test_central_charge_matches_catalog():
    k = sympy.Symbol("k")
    for kind, name in (("N1", "osp(1|2)"), ("N2", "sl(2|1)")):
        ours = sympy.sympify(str(central_charge_of_k(kind).as_expr()))
        assert sympy.simplify(ours - central_charge(load_algebra(name)).subs(sympy.Symbol("k"), k)) == 0


@pytest.mark.parametrize("kind,sector,level", [("N1", "ns", 3), ("N1", "ramond", 2),
                                               ("N2", "ns", F(3, 2)), ("N2", "ramond", 1)])
def test_formula_agrees_with_oracle(kind, sector, level):
    rep = compare_all(kind, sector, level)
    assert rep.checks and rep.passed, rep.first_failure()


def test_ratio_is_constant_at_first_level():
    cmp = compare_with_formula("N1", "ns", (0, half))
    assert cmp.matched and cmp.ratio == 2
    cmp = compare_with_formula("N2", "ramond", (1, 0))
    assert cmp.matched and cmp.ratio == 2


@pytest.mark.parametrize("kind,sector,eta", [("N1", "ns", (0, 2)), ("N1", "ramond", (0, 2)),
                                             ("N2", "ns", (0, 1)), ("N2", "ramond", (1, 1))])
def test_vanishing_locus(kind, sector, eta):
    rep = vanishing_locus_check(kind, sector, eta, seed=3, samples=5)
    assert rep.checks and rep.passed, rep.first_failure()
