from __future__ import annotations

from typing import Dict

import numpy as np
import pytest

from local_moufang.catalog import CATALOG, catalog_pair, default_e, nonabelian_control, swapped_tau_control
from local_moufang.errors import ConstructionError, HypothesisFailed, NotUnit, SideViolation
from local_moufang.moufang import (
    FinMoufang,
    build_from_U_tau,
    check_abelian,
    check_special,
    divide,
    division_hypothesis,
    is_unit_point,
    little_projective_group,
    mu_map,
    scalar,
    tilde_of,
    verify_isomorphism,
    verify_moufang,
)
from local_moufang.projective import build_moufang_from_pair


@pytest.fixture(scope="module")
def sets() -> Dict[str, FinMoufang]:
    out = {}
    for spec in CATALOG:
        V = catalog_pair(spec)
        out[spec] = build_moufang_from_pair(V, default_e(V))
    return out


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_sets_are_moufang(sets: Dict[str, FinMoufang], spec: str) -> None:
    report = verify_moufang(sets[spec])
    assert report.passed, report.failures()
    assert check_special(sets[spec])
    assert check_abelian(sets[spec])


def test_full_conjugation_on_small_set(sets: Dict[str, FinMoufang]) -> None:
    report = verify_moufang(sets["zmod:5:1"], full_conjugation=True)
    assert report.check("lm3.conjugation").status == "pass"
    assert "every element" in report.check("lm3.conjugation").note


def test_units_and_mu(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:2"]
    assert is_unit_point(M, 1)
    assert not is_unit_point(M, 5)
    assert not is_unit_point(M, M.inf)
    mu = mu_map(M, 2)
    assert mu(M.zero) == M.inf and mu(M.inf) == M.zero
    assert (mu * mu).is_identity()
    with pytest.raises(NotUnit):
        mu_map(M, 5)


def test_tilde_is_negation_in_commutative_rings(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:1"]
    assert tilde_of(M, 2) == 3
    with pytest.raises(NotUnit):
        tilde_of(M, M.zero)


def test_scalars_and_division(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:2"]
    assert scalar(M, 2, 3) == 6
    assert divide(M, 1, 2) == 13
    assert divide(M, 5, 2) == 15
    for x in np.flatnonzero(M.not_inf):
        for n in (2, 3):
            y = divide(M, int(x), n)
            assert scalar(M, y, n) == x
    with pytest.raises(SideViolation):
        divide(M, M.inf, 2)


def test_division_hypothesis_fails_on_z4(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:4:1"]
    witness = division_hypothesis(M, 2)
    assert witness == {"u": "A:1", "k": "2", "u*k": "A:2"}
    with pytest.raises(HypothesisFailed):
        divide(M, 1, 2)


def test_little_projective_group_of_z5(sets: Dict[str, FinMoufang]) -> None:
    G = little_projective_group(sets["zmod:5:1"])
    assert G.order == 60
    assert G.pair_transitive
    assert G.pair_count == 30


def test_little_projective_group_z4_is_pair_transitive(sets: Dict[str, FinMoufang]) -> None:
    assert little_projective_group(sets["zmod:4:1"]).pair_transitive


def test_swapped_tau_fails_criterion_ii(sets: Dict[str, FinMoufang]) -> None:
    bad = swapped_tau_control(sets["zmod:5:1"])
    report = verify_moufang(bad)
    check = report.check("criterion.ii_U0_mu_is_Uinf")
    assert check.failed
    assert "x" in check.witness


def test_nonabelian_control() -> None:
    M = nonabelian_control()
    assert M.size == 7
    assert M.inf == 6 and M.zero == 0
    assert not check_abelian(M)


def test_two_classes_are_rejected() -> None:
    with pytest.raises(ConstructionError, match="need more than 2 classes"):
        build_from_U_tau(["a", "b"], [[0], [1]], [[0, 1]], [1, 0])


def test_u_inf_must_be_a_group(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:1"]
    classes = [[i] for i in range(M.size)]
    with pytest.raises(ConstructionError) as err:
        build_from_U_tau(M.labels, classes, M.u_inf[1:], M.tau)
    assert err.value.code == "group"


def test_identity_isomorphism(sets: Dict[str, FinMoufang]) -> None:
    M = sets["zmod:5:1"]
    ident = np.arange(M.size)
    report = verify_isomorphism(M, M, ident, M.u_inf, M.tau, M.tau)
    assert report.passed, report.failures()
    shifted = np.roll(ident, 1)
    assert not verify_isomorphism(M, M, shifted, M.u_inf, M.tau, M.tau).passed
