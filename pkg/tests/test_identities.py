from __future__ import annotations

from fractions import Fraction
from typing import Dict

import numpy as np
import pytest

from local_moufang.catalog import CATALOG, catalog_pair, default_e, nonabelian_control
from local_moufang.identities import ABELIAN_CHECKS, scale, verify_identity_suite
from local_moufang.moufang import FinMoufang, divide
from local_moufang.projective import build_moufang_from_pair


@pytest.fixture(scope="module")
def sets() -> Dict[str, FinMoufang]:
    out = {}
    for spec in CATALOG:
        V = catalog_pair(spec)
        out[spec] = build_moufang_from_pair(V, default_e(V))
    return out


@pytest.mark.parametrize("spec", CATALOG)
def test_identity_suite_holds_on_catalog(sets: Dict[str, FinMoufang], spec: str) -> None:
    report = verify_identity_suite(sets[spec])
    assert report.passed, report.failures()
    assert report.facts["special"] and report.facts["abelian"]


def test_division_sections_skip_on_z4(sets: Dict[str, FinMoufang]) -> None:
    report = verify_identity_suite(sets["zmod:4:1"])
    assert report.check("division.unique[2]").status == "skip"
    assert report.check("scale.mu_plain[1/2]").status == "skip"
    assert report.check("mu.inverse").status == "pass"


def test_division_sections_run_on_z25(sets: Dict[str, FinMoufang]) -> None:
    report = verify_identity_suite(sets["zmod:5:2"])
    for name in ("division.unique[3]", "division.global_unique[2]", "scale.tilde_is_inverse[1/3]"):
        assert report.check(name).status == "pass"


def test_scale_agrees_with_divide(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:2"]
    for x in np.flatnonzero(M.not_inf):
        assert scale(M, int(x), Fraction(1, 2)) == divide(M, int(x), 2)
        assert scale(M, int(x), Fraction(3, 2)) == divide(M, int(M.scalar_table(3)[x]), 2)
    with pytest.raises(ValueError):
        scale(M, 1, Fraction(1, 5))


def test_nonabelian_control_reports_abelian_failure() -> None:
    report = verify_identity_suite(nonabelian_control())
    assert not report.passed
    assert report.check("abelian").failed
    assert report.check("abelian").witness
    for name in ABELIAN_CHECKS:
        assert report.check(name).status == "skip"
