"""The eight acceptance criteria as reports, shared by `wkac verify` and the test suite."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .catalog import all_algebras, dual_coxeter, structural_checks
from .determinant import closed_form_check, derivation_consistency, general_consistency
from .oracle import compare_all, vanishing_locus_check, weight_spaces
from .partitions import dual_method_report, partition_count
from .report import Report
from .twist import family_grid, family_twist, make_sector, verify_rho_conjecture
from .weights import central_charge, central_charge_fixture, central_charge_matches

ORACLE_LEVELS = {("N1", "ns"): Fraction(7, 2), ("N1", "ramond"): Fraction(3),
                 ("N2", "ns"): Fraction(2), ("N2", "ramond"): Fraction(2)}
# determinants are cached, so the vanishing checks reuse the oracle weight spaces
VANISHING_LEVELS = ORACLE_LEVELS


def catalog_identities() -> Report:
    rep = Report("1. catalog identities")
    for A in all_algebras():
        hv = dual_coxeter(A)
        rep.add(f"{A.name}: h^v from roots equals stated value", hv == A.h_dual_stated, f"h^v = {hv}")
        s = structural_checks(A)
        for c in s.checks:
            if "sdim" in c.name or c.name.endswith("R = 0"):
                rep.checks.append(c)
    return rep


def central_charges() -> Report:
    rep = Report("2. central charges")
    for A in all_algebras():
        rep.add(f"{A.name}: c(k) from catalog data equals closed form", central_charge_matches(A),
                f"c = {central_charge(A)} vs {central_charge_fixture(A)}")
    return rep


def rho_grid() -> Report:
    rep = Report("3. twisted Weyl vector")
    for A in all_algebras():
        twists = [make_sector(A, "ns"), make_sector(A, "ramond")]
        twists += [family_twist(A, p) for p in family_grid(A)]
        bad, indeterminate = [], []
        for t in twists:
            r = verify_rho_conjecture(A, t)
            if any("indeterminate" in c.detail for c in r.checks):
                indeterminate.append(t.sector_label)
            elif not r.passed:
                bad.append(t.sector_label)
        detail = f"{len(twists)} twists"
        if bad:
            detail += f", fails at {bad[0]}"
        if indeterminate:
            detail += f", indeterminate at {indeterminate[0]}"
        rep.add(f"{A.name}: 2(rho|a) = (a|a) on affine simple roots", not bad and not indeterminate, detail)
    return rep


def partitions(max_level: int = 4) -> Report:
    rep = Report("4. partition engine")
    for A in all_algebras():
        for sector in ("ns", "ramond"):
            rep.extend(dual_method_report(A, make_sector(A, sector), max_level))
    A = all_algebras()[0]
    ns, r = make_sector(A, "ns"), make_sector(A, "ramond")
    got = [partition_count(A, ns, (0, Fraction(j, 2))) for j in range(5)]
    rep.add(f"{A.name} ns: counts at levels 0..2 in steps of 1/2", got == [1, 1, 1, 2, 3], str(got))
    got = [partition_count(A, r, (0, j)) for j in range(3)]
    rep.add(f"{A.name} ramond: counts at levels 0, 1, 2", got == [1, 2, 4], str(got))
    return rep


def closed_forms(max_index: int = 3) -> Report:
    rep = Report("5. closed-form fixtures")
    for A in all_algebras():
        for sector in ("ns", "ramond"):
            rep.extend(closed_form_check(A, sector, max_index))
    return rep


def oracle_certification(levels: dict | None = None) -> Report:
    rep = Report("6. Gram determinant oracle")
    for (kind, sector), level in (levels or ORACLE_LEVELS).items():
        rep.extend(compare_all(kind, sector, level))
    return rep


def vanishing_locus(seed: int = 0, samples: int = 20) -> Report:
    rep = Report("7. vanishing locus")
    for (kind, sector), level in VANISHING_LEVELS.items():
        for eta in weight_spaces(kind, sector, level):
            if eta[1] == 0:
                continue
            rep.extend(vanishing_locus_check(kind, sector, eta, seed, samples))
    return rep


def general_specialization(max_index: int = 2) -> Report:
    rep = Report("8. general twist specialization")
    for A in all_algebras():
        rep.extend(general_consistency(A, max_index))
        for sector in ("ns", "ramond"):
            rep.extend(derivation_consistency(A, make_sector(A, sector), max_index))
    return rep


CRITERIA: dict[int, tuple[str, Callable[[], Report]]] = {
    1: ("catalog identities", catalog_identities),
    2: ("central charges", central_charges),
    3: ("twisted Weyl vector conjecture", rho_grid),
    4: ("partition engine", partitions),
    5: ("closed-form fixtures", closed_forms),
    6: ("oracle certification", oracle_certification),
    7: ("vanishing locus", vanishing_locus),
    8: ("general twist specialization", general_specialization),
}


@dataclass
class CriterionResult:
    number: int
    title: str
    report: Report
    seconds: float

    @property
    def passed(self) -> bool:
        return self.report.passed and bool(self.report.checks)

    def line(self) -> str:
        # no timings here: verify output must be byte-identical between runs
        n = len(self.report.checks)
        if self.passed:
            return f"[PASS] criterion {self.number} ({self.title}): {n} checks"
        first = self.report.first_failure()
        tail = f"first failure: {first.name}" if first else "no checks ran"
        return f"[FAIL] criterion {self.number} ({self.title}): {n} checks; {tail}"


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    rep = fn()
    return CriterionResult(number, title, rep, time.perf_counter() - t0)


def run_all() -> list[CriterionResult]:
    return [run_criterion(n) for n in CRITERIA]
