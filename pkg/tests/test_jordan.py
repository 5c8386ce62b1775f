from __future__ import annotations

from typing import Dict

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from local_moufang.catalog import CATALOG, catalog_pair, control_pair
from local_moufang.errors import NotInvertible, NotQuadratic, NotQuasiInvertible, SideMismatch
from local_moufang.jordan import (
    JordanPair,
    bergman_apply,
    is_division,
    jp_inverse,
    make_pair_from_ring,
    q_apply,
    quasi_inverse,
    radical,
    verify_basic_identities,
    verify_homomorphism,
    verify_jordan_axioms,
    verify_local,
)
from local_moufang.models import JElem, Side
from local_moufang.ring import ring_from_text

PLUS, MINUS = Side.PLUS, Side.MINUS


@pytest.fixture(scope="module")
def pairs() -> Dict[str, JordanPair]:
    return {spec: catalog_pair(spec) for spec in CATALOG}


def test_q_apply_examples(pairs: Dict[str, JordanPair]) -> None:
    assert q_apply(pairs["zmod:5:2"], JElem(PLUS, 2), JElem(MINUS, 3)) == JElem(PLUS, 12)
    assert q_apply(pairs["zmod:4:1"], JElem(PLUS, 2), JElem(MINUS, 1)) == JElem(PLUS, 0)
    assert q_apply(pairs["zmod:7:1"], JElem(MINUS, 3), JElem(PLUS, 2)) == JElem(MINUS, 4)
    with pytest.raises(SideMismatch):
        q_apply(pairs["zmod:5:1"], JElem(PLUS, 2), JElem(PLUS, 3))


def test_bergman_and_inverses(pairs: Dict[str, JordanPair]) -> None:
    V = pairs["zmod:5:2"]
    assert bergman_apply(V, JElem(PLUS, 2), JElem(MINUS, 3), JElem(PLUS, 1)) == JElem(PLUS, 0)
    assert jp_inverse(V, JElem(PLUS, 2)) == JElem(MINUS, 13)
    assert jp_inverse(pairs["zmod:7:1"], JElem(PLUS, 3)) == JElem(MINUS, 5)
    with pytest.raises(NotInvertible):
        jp_inverse(V, JElem(PLUS, 5))


def test_quasi_inverse(pairs: Dict[str, JordanPair]) -> None:
    V = pairs["zmod:5:2"]
    assert quasi_inverse(V, JElem(PLUS, 5), JElem(MINUS, 3)) == JElem(PLUS, 5)
    # 1 - 1*1 = 0 is not a unit
    with pytest.raises(NotQuasiInvertible):
        quasi_inverse(V, JElem(PLUS, 1), JElem(MINUS, 1))


def test_radicals(pairs: Dict[str, JordanPair]) -> None:
    rad25 = frozenset({0, 5, 10, 15, 20})
    assert radical(pairs["zmod:5:2"]) == (rad25, rad25)
    assert radical(pairs["zmod:4:1"]) == (frozenset({0, 2}), frozenset({0, 2}))
    assert radical(pairs["zmod:5:1"]) == (frozenset({0}), frozenset({0}))
    assert is_division(pairs["zmod:7:1"])
    assert not is_division(pairs["poly:5:2"])


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_pairs_pass_the_jordan_suite(pairs: Dict[str, JordanPair], spec: str) -> None:
    V = pairs[spec]
    for report in (verify_jordan_axioms(V), verify_local(V), verify_basic_identities(V)):
        assert report.passed, report.failures()


def test_two_torsion_is_skipped_not_failed(pairs: Dict[str, JordanPair]) -> None:
    report = verify_jordan_axioms(pairs["zmod:4:1"])
    assert report.check("no_2_torsion[+]").status == "skip"
    assert report.check("jp3[+]").status == "pass"


@pytest.mark.parametrize("kind", ["linear", "shifted"])
def test_negative_controls_fail_with_witness(kind: str) -> None:
    V = control_pair(ring_from_text("zmod:5:1"), kind)
    report = verify_jordan_axioms(V)
    assert not report.passed
    assert all(c.witness for c in report.failures())


def test_control_rejected_when_validating() -> None:
    R = ring_from_text("zmod:5:1")
    V = control_pair(R, "linear")
    with pytest.raises(NotQuadratic):
        JordanPair(*V.modules, V.q[0], V.q[1])


def test_homomorphism_identity_and_non_homomorphism() -> None:
    V = make_pair_from_ring(ring_from_text("zmod:5:1"))
    ident = np.arange(5)
    assert verify_homomorphism(V, V, ident, ident).passed
    doubled = (2 * ident) % 5
    report = verify_homomorphism(V, V, doubled, ident)
    assert report.check("hom.quadratic[+]").failed
    assert report.check("hom.additive[+]").status == "pass"


@given(x=st.integers(0, 24), y=st.integers(0, 24), z=st.integers(0, 24))
def test_bergman_is_square_of_one_minus_xy(x: int, y: int, z: int) -> None:
    V = catalog_pair("zmod:5:2")
    got = bergman_apply(V, JElem(PLUS, x), JElem(MINUS, y), JElem(PLUS, z)).value
    assert got == ((1 - x * y) ** 2 * z) % 25
