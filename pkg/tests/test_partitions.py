from fractions import Fraction as F

import pytest

from wkac.catalog import load_algebra
from wkac.partitions import (
    PartitionCounter,
    RootNotInSystemError,
    WRoot,
    default_max_level,
    dual_method_report,
    format_product,
    generating_function_series,
    lattice_points,
    partition_count,
    partition_excluding,
    partition_series,
    positive_level_only_series,
    positive_roots_W,
)
from wkac.twist import make_sector


def _sector(name, sector):
    A = load_algebra(name)
    return A, make_sector(A, sector)


def test_osp12_ns_roots_to_level_two():
    A, t = _sector("osp(1|2)", "ns")
    roots = positive_roots_W(A, t, 2)
    assert roots == [WRoot(F(1, 2), F(0), "odd", 1), WRoot(F(1), F(0), "even", 1),
                     WRoot(F(3, 2), F(0), "odd", 1), WRoot(F(2), F(0), "even", 1)]


def test_sl21_ramond_has_level_zero_fermion():
    A, t = _sector("sl(2|1)", "ramond")
    roots = positive_roots_W(A, t, 1)
    assert WRoot(F(0), F(1), "odd", 1) in roots
    assert WRoot(F(1), F(1), "odd", 1) in roots
    assert WRoot(F(1), F(-1), "odd", 1) in roots
    assert WRoot(F(0), F(-1), "odd", 1) not in roots


def test_level_zero_cutoff_keeps_only_level_zero_roots(algebra, sector):
    t = make_sector(algebra, sector)
    roots = positive_roots_W(algebra, t, 0)
    assert all(r.level == 0 and r.charge > 0 for r in roots)


def test_n1_ns_counts():
    A, t = _sector("osp(1|2)", "ns")
    assert [partition_count(A, t, (0, F(j, 2))) for j in range(5)] == [1, 1, 1, 2, 3]


def test_n1_ramond_counts():
    A, t = _sector("osp(1|2)", "ramond")
    assert [partition_count(A, t, (0, j)) for j in range(3)] == [1, 2, 4]


def test_empty_partition(algebra, sector):
    assert partition_count(algebra, make_sector(algebra, sector), (0, 0)) == 1


def test_sl21_ns_level_one():
    A, t = _sector("sl(2|1)", "ns")
    assert partition_count(A, t, (0, 1)) == 3


def test_exclusion_examples():
    A, t = _sector("sl(2|1)", "ns")
    assert partition_excluding(A, t, (1, F(1, 2)), (1, F(1, 2))) == 0
    assert partition_excluding(A, t, (1, F(1, 2)), (1, F(3, 2))) == 1
    assert partition_excluding(A, t, (1, F(1, 2)), (0, 0)) == 1
    with pytest.raises(RootNotInSystemError):
        partition_excluding(A, t, (5, F(1, 2)), (0, 1))


def test_exclusion_can_name_parity():
    # the Ramond point (1, 0) of osp(3|2) carries both an even and an odd root
    A, t = _sector("osp(3|2)", "ramond")
    pc = PartitionCounter(A, t)
    odd = pc.count(1, 1, exclude=(1, 0, "odd"))
    even = pc.count(1, 1, exclude=(1, 0, "even"))
    assert (odd, even, pc.count(1, 1)) == (7, 5, 12)
    assert odd == partition_series(A, t, 1, exclude=(1, 0, "odd")).coefficient(1, 1)


def test_series_matches_recursion(algebra, sector):
    rep = dual_method_report(algebra, make_sector(algebra, sector), 3)
    assert rep.passed, rep.first_failure()


def test_series_matches_stored_product(algebra, sector):
    t = make_sector(algebra, sector)
    params = algebra.fixture["display_params"][sector]
    ours = partition_series(algebra, t, 3)
    stored = generating_function_series(algebra, params, 3, ours.charge_cap)
    for c, l in lattice_points(algebra, t, 3):
        assert ours.coefficient(c, l) == stored.coefficient(c, l), (c, l)


def test_counter_extends_past_default_cutoff():
    A, t = _sector("osp(1|2)", "ns")
    pc = PartitionCounter(A, t, 2)
    assert pc.count(0, 8) == partition_series(A, t, 8).coefficient(0, 8)
    assert pc.cutoff >= 8


def test_max_level_environment(monkeypatch):
    monkeypatch.setenv("WKAC_MAX_LEVEL", "9/2")
    assert default_max_level() == F(9, 2)
    monkeypatch.delenv("WKAC_MAX_LEVEL")
    assert default_max_level() == 6


def test_format_product():
    A, t = _sector("osp(1|2)", "ramond")
    assert format_product(A, t, 1) == "(1 - x^(0) y^(1))^-1 * (1 + x^(0) y^(1))"


def test_positive_level_series_is_charge_even(algebra, sector):
    s = positive_level_only_series(algebra, make_sector(algebra, sector), 3)
    for (c, l, n) in s.points():
        assert s.coefficient(-c, l) == n, (c, l)
