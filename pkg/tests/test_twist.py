from fractions import Fraction as F

import pytest

from wkac.catalog import THETA, load_algebra, vadd, vscale, weyl_vectors
from wkac.twist import (
    SectorSpecError,
    TwistValidationError,
    affine_simple_roots,
    family_grid,
    family_twist,
    frac_mod1,
    is_special,
    make_sector,
    parse_sector,
    ramond_rho_closed_form,
    twist_from_values,
    twisted_rho,
    verify_rho_conjecture,
)


def test_parse_sector_forms():
    assert parse_sector("NS") == ("ns", {})
    assert parse_sector("r") == ("ramond", {})
    assert parse_sector("general:eps=1/8, sigma=1/2") == ("general", {"eps": F(1, 8), "sigma": F(1, 2)})
    with pytest.raises(SectorSpecError):
        parse_sector("twisted")
    with pytest.raises(SectorSpecError):
        parse_sector("general:eps=0.125")


def test_sl21_ramond_assignment():
    A = load_algebra("sl(2|1)")
    t = make_sector(A, "ramond")
    assert t.of(A.root("a1")) == t.of(A.root("a2")) == F(1, 2)
    assert t.of(A.theta) == 0


def test_sl21_general_family():
    A = load_algebra("sl(2|1)")
    t = family_twist(A, {"eps": F(1, 8)})
    assert t.of(A.root("a2")) == F(1, 8)
    assert t.of(A.root("a1")) == F(7, 8)
    assert t.of(-A.root("a2")) == F(7, 8)


def test_sl3_additivity_violation_is_reported():
    A = load_algebra("sl(3)")
    with pytest.raises(TwistValidationError, match="a1.*a2.*theta|a2.*a1.*theta"):
        twist_from_values(A, {"theta": 0, "a1": 0, "a2": "1/4"})


def test_unknown_family_parameter():
    with pytest.raises(SectorSpecError, match="sigma"):
        family_twist(load_algebra("sl(2|1)"), {"sigma": F(1, 4)})


def test_theta_half_forces_discrete_twist():
    A = load_algebra("osp(1|2)")
    with pytest.raises(TwistValidationError):
        family_twist(A, {"eps": F(1, 4)})
    assert family_grid(A) == [{"eps": F(0)}, {"eps": F(1, 2)}]


def test_ns_rho_is_rho(algebra):
    assert twisted_rho(algebra, make_sector(algebra, "ns")).rho_tilde == weyl_vectors(algebra).rho


def test_ramond_rho_closed_form(algebra):
    assert twisted_rho(algebra, make_sector(algebra, "ramond")).rho_tilde == ramond_rho_closed_form(algebra)


def test_osp12_ramond_rho_is_theta_half():
    A = load_algebra("osp(1|2)")
    assert twisted_rho(A, make_sector(A, "ramond")).rho_tilde == vscale(F(1, 2), THETA)


def test_rho_conjecture_special_sectors(algebra, sector):
    rep = verify_rho_conjecture(algebra, make_sector(algebra, sector))
    assert rep.passed and rep.checks, rep.first_failure()
    assert not any("indeterminate" in c.detail for c in rep.checks)


@pytest.mark.parametrize("eps", [F(1, 8), F(1, 4), F(3, 8)])
def test_rho_conjecture_sl21_grid(eps):
    A = load_algebra("sl(2|1)")
    rep = verify_rho_conjecture(A, family_twist(A, {"eps": eps}))
    assert rep.passed and rep.checks


def test_ramond_simple_roots_include_half_level_roots():
    A = load_algebra("so(5)")
    simple = affine_simple_roots(A, make_sector(A, "ramond"))
    assert len(simple) == len(A.simple_roots) + 1
    assert any(m == F(1, 2) for _, _, m in simple)


def test_is_special():
    A = load_algebra("sl(3)")
    assert is_special(family_twist(A, {"eps": 0})) == "ns"
    assert is_special(family_twist(A, {"eps": F(1, 2)})) == "ramond"
    assert is_special(family_twist(A, {"eps": F(1, 4)})) is None


def test_frac_mod1():
    assert frac_mod1(F(-1, 4)) == F(3, 4)
    assert frac_mod1(F(5, 2)) == F(1, 2)
    assert frac_mod1(0) == 0
