from __future__ import annotations

from typing import Dict

import numpy as np
import pytest

from local_moufang.catalog import EXTRACTABLE, catalog_pair, default_e, nonabelian_control
from local_moufang.errors import ExtractionError, NotUnit, SideViolation
from local_moufang.extraction import (
    ANCHORED_CHECKS,
    ExtractedPair,
    check_preconditions,
    export_tables,
    extract,
    mu_bilinear,
    verify_extraction_identities,
)
from local_moufang.moufang import FinMoufang
from local_moufang.projective import build_moufang_from_pair


def _moufang(spec: str) -> FinMoufang:
    V = catalog_pair(spec)
    return build_moufang_from_pair(V, default_e(V))


@pytest.fixture(scope="module")
def extracted() -> Dict[str, ExtractedPair]:
    return {spec: extract(_moufang(spec)) for spec in EXTRACTABLE}


@pytest.mark.parametrize("spec", EXTRACTABLE)
def test_extraction_report_passes(extracted: Dict[str, ExtractedPair], spec: str) -> None:
    ex = extracted[spec]
    assert ex.report is not None
    assert ex.report.passed, ex.report.failures()
    assert ex.report.check("rad.matches_classes[+]").status == "pass"
    assert ex.report.check("pre/j4.cascade_agreement[-]").status == "pass"


def test_sizes_and_radicals(extracted: Dict[str, ExtractedPair]) -> None:
    ex = extracted["zmod:5:2"]
    assert ex.pair.sizes == (25, 25)
    assert ex.report.facts["radical_sizes"] == [5, 5]
    ex = extracted["zmod:5:1"]
    assert ex.pair.sizes == (5, 5)
    assert ex.report.facts["radical_sizes"] == [1, 1]


def test_z4_is_rejected_at_j3() -> None:
    with pytest.raises(ExtractionError) as err:
        extract(_moufang("zmod:4:1"))
    report = err.value.report
    assert report is not None
    j3 = report.check("j3.units_times_2")
    assert j3.failed
    assert j3.witness == {"x": "A:1", "x*2": "A:2"}
    assert report.check("j4.symmetric[+]").status == "skip"


def test_nonabelian_control_is_rejected_at_j2() -> None:
    M = nonabelian_control()
    report = check_preconditions(M)
    assert report.check("j2.abelian").failed
    with pytest.raises(ExtractionError):
        extract(M)


def test_mu_bilinear_on_z5() -> None:
    M = _moufang("zmod:5:1")
    table = mu_bilinear(M, 1, 2)
    # yQ_{1,2} = 4y; the point A(4) stands for y = 1 in V-
    assert table[4] == 4
    assert table[M.zero] == -1
    with pytest.raises(SideViolation):
        mu_bilinear(M, M.inf, 1)


def test_explicit_e_and_tau() -> None:
    M = _moufang("zmod:5:1")
    ex = extract(M, tau=1, e=1)
    assert ex.report.passed, ex.report.failures()
    assert ex.report.facts["tau"] == "A:1"
    with pytest.raises(NotUnit):
        extract(M, e=M.zero)


def test_q_of_units_is_mu(extracted: Dict[str, ExtractedPair]) -> None:
    ex = extracted["zmod:7:1"]
    frame = ex.frame
    units = np.flatnonzero(frame.units[0])
    assert np.array_equal(ex.pair.q[0][units], frame.mu[0][units])


def test_local_and_point_indices(extracted: Dict[str, ExtractedPair]) -> None:
    ex = extracted["poly:5:2"]
    M = ex.moufang
    for p in np.flatnonzero(M.not_inf):
        assert ex.to_point(0, ex.to_local(0, int(p))) == p
    with pytest.raises(SideViolation):
        ex.to_local(0, M.inf)


def test_deep_mode_identities() -> None:
    ex = extract(_moufang("zmod:5:1"), deep=True)
    assert ex.report.passed, ex.report.failures()
    report = verify_extraction_identities(ex, deep=True)
    assert all(report.check(name).status == "pass" for name in ANCHORED_CHECKS)
    shallow = verify_extraction_identities(ex)
    assert all(shallow.check(name).status == "skip" for name in ANCHORED_CHECKS)


def test_export_tables_shape(extracted: Dict[str, ExtractedPair]) -> None:
    tables = export_tables(extracted["zmod:5:1"])
    assert tables["e"] == "A:1"
    assert set(tables) == {"e", "plus", "minus"}
    plus = tables["plus"]
    assert len(plus["labels"]) == 5
    assert len(plus["add"]) == 5 and len(plus["add"][0]) == 5
    assert plus["zero"] == "A:0"
    assert tables["minus"]["zero"] == "R:0"
