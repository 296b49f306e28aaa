from fractions import Fraction as F

import pytest

from wkac.catalog import (
    THETA,
    UnknownAlgebraError,
    bilinear,
    check_catalog_invariants,
    dual_coxeter,
    grade,
    load_algebra,
    minimal_gradation,
    sdim_half,
    structural_checks,
    weyl_vectors,
)

STATED_H_DUAL = {
    "osp(1|2)": F(3, 2), "sl(2|1)": F(1), "sl(3)": F(3), "osp(3|2)": F(1, 2),
    "so(5)": F(3), "psl(2|2)": F(0), "G_2": F(4), "osp(1|4)": F(5, 2),
}


def test_h_dual_matches_stated_values(algebra):
    assert dual_coxeter(algebra) == STATED_H_DUAL[algebra.name]


def test_sdim_half_identity(algebra):
    assert sdim_half(algebra) == 2 * dual_coxeter(algebra) - 4


def test_structural_checks_pass(algebra):
    rep = structural_checks(algebra)
    assert rep.passed, rep.first_failure()


def test_catalog_invariants_pass(algebra):
    rep = check_catalog_invariants(algebra)
    assert rep.passed, rep.first_failure()


def test_theta_norm_and_zero_vector(algebra):
    assert bilinear(algebra, THETA, THETA) == 2
    assert bilinear(algebra, algebra.theta, (F(0), F(0))) == 0


def test_sl21_simple_root_product():
    A = load_algebra("sl(2|1)")
    assert bilinear(A, A.root("a1"), A.root("a2")) == 1
    assert sum(1 for r in A.roots if r.odd) == 4
    assert sum(1 for r in A.roots if not r.odd) == 2


def test_g2_root_lengths():
    A = load_algebra("g2")
    assert len(A.roots) == 12
    norms = sorted({bilinear(A, r, r) for r in A.roots})
    assert norms == [F(2, 3), F(2)]


def test_psl22_odd_multiplicity():
    A = load_algebra("psl(2|2)")
    g = minimal_gradation(A)
    assert all(r.multiplicity == 2 for r in A.roots if r.odd)
    assert sum(1 for r in A.roots if not r.odd) == 4
    assert len(g.delta_half) == 4


def test_grades():
    assert grade(load_algebra("sl(2|1)"), THETA) == 1
    assert grade(load_algebra("sl(2|1)"), load_algebra("sl(2|1)").root("a1")) == F(1, 2)
    assert grade(load_algebra("so(5)"), load_algebra("so(5)").root("a2")) == 0


def test_gradation_examples():
    g = minimal_gradation(load_algebra("sl(2|1)"))
    assert [r.label for r in g.delta_half_plus] == ["a1"]
    assert [r.label for r in g.delta_half_minus] == ["a2"]
    g = minimal_gradation(load_algebra("osp(1|2)"))
    assert g.delta0 == () or not g.delta0
    assert g.has_theta_half
    assert sorted(r.label for r in minimal_gradation(load_algebra("so(5)")).delta_half) == ["a1", "a3"]


def test_weyl_vector_examples():
    so5 = load_algebra("so(5)")
    assert weyl_vectors(so5).rho_half_nat == (F(0), so5.root("a3").coords[1] / 2)
    g2 = load_algebra("G_2")
    rh = weyl_vectors(g2).rho_half
    a4, a5 = g2.root("a4").coords, g2.root("a5").coords
    assert rh == ((a4[0] + a5[0]) / 2, (a4[1] + a5[1]) / 2)


def test_osp32_rho0_is_half_the_delta0_root():
    # the positive Delta_0 root is a2 here; rho_0 is half of it by definition
    A = load_algebra("osp(3|2)")
    a2 = A.root("a2").coords
    assert weyl_vectors(A).rho0 == (a2[0] / 2, a2[1] / 2)


def test_unknown_algebra_lists_valid_names():
    with pytest.raises(UnknownAlgebraError, match="osp\\(1\\|2\\)"):
        load_algebra("e8")


def test_alias_and_case_folding():
    assert load_algebra("g_2").name == "G_2"
    assert load_algebra("SL(2|1)").name == "sl(2|1)"
