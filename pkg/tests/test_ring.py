from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from local_moufang.catalog import CATALOG
from local_moufang.errors import NonUnit, RingSpecError
from local_moufang.models import RingSpec
from local_moufang.ring import (
    construct_ring,
    enumerate_elements,
    invert,
    is_unit,
    parse_ring_spec,
    ring_from_text,
    verify_ring,
)


def test_parse_ring_spec() -> None:
    assert parse_ring_spec("zmod:5:2") == RingSpec(kind="zmod", p=5, k=2)
    assert parse_ring_spec(" poly:5:2 ") == RingSpec(kind="poly", p=5, k=2)
    for bad in ("", "zmod:5", "gf:5:1", "zmod:a:1"):
        with pytest.raises(RingSpecError):
            parse_ring_spec(bad)


def test_construct_rejects_composite_and_oversized() -> None:
    with pytest.raises(RingSpecError):
        ring_from_text("zmod:6:1")
    with pytest.raises(RingSpecError):
        ring_from_text("zmod:5:0")
    with pytest.raises(RingSpecError):
        ring_from_text("zmod:5:6")
    assert ring_from_text("zmod:5:6", size_cap=5**6).size == 15625


def test_prime_power_modulus_is_normalized_when_parsed() -> None:
    assert parse_ring_spec("zmod:4:1") == RingSpec(kind="zmod", p=2, k=2)
    assert parse_ring_spec("zmod:25:2") == RingSpec(kind="zmod", p=5, k=4)
    assert parse_ring_spec("zmod:6:1") == RingSpec(kind="zmod", p=6, k=1)
    R = ring_from_text("zmod:4:1")
    assert str(R.spec) == "zmod:2:2"
    assert R.size == 4
    assert R.mul(2, 2) == 0


def test_construct_ring_needs_a_prime() -> None:
    for spec in (RingSpec("zmod", 4, 1), RingSpec("zmod", 6, 1), RingSpec("poly", 4, 1)):
        with pytest.raises(RingSpecError, match="not prime"):
            construct_ring(spec)
    assert construct_ring(RingSpec("zmod", 2, 2)).size == 4


def test_zmod25_units_and_inverses() -> None:
    R = ring_from_text("zmod:5:2")
    assert invert(R, 11) == 16
    assert invert(R, 2) == 13
    assert [a for a in enumerate_elements(R) if not is_unit(R, a)] == [0, 5, 10, 15, 20]
    with pytest.raises(NonUnit):
        invert(R, 10)


def test_small_radicals() -> None:
    Z4 = ring_from_text("zmod:4:1")
    assert [a for a in enumerate_elements(Z4) if not is_unit(Z4, a)] == [0, 2]
    Z5 = ring_from_text("zmod:5:1")
    assert [a for a in enumerate_elements(Z5) if not is_unit(Z5, a)] == [0]


def test_poly_labels_round_trip() -> None:
    R = ring_from_text("poly:5:2")
    assert R.parse("1+2t") == 11
    assert R.format(11) == "1+2t"
    assert R.format(5) == "t"
    assert R.format(0) == "0"
    assert all(R.parse(R.format(a)) == a for a in enumerate_elements(R))
    # t is nilpotent, 1+t is a unit
    assert R.mul(5, 5) == 0
    assert is_unit(R, R.parse("1+t"))


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_rings_are_local(spec: str) -> None:
    report = verify_ring(ring_from_text(spec))
    assert report.passed, report.failures()


@given(a=st.integers(0, 24), b=st.integers(0, 24))
def test_poly_mul_commutes_and_units_multiply(a: int, b: int) -> None:
    R = ring_from_text("poly:5:2")
    assert R.mul(a, b) == R.mul(b, a)
    assert is_unit(R, R.mul(a, b)) == (is_unit(R, a) and is_unit(R, b))


@given(a=st.integers(0, 24).filter(lambda a: a % 5))
def test_zmod_inverse_is_two_sided(a: int) -> None:
    R = ring_from_text("zmod:5:2")
    b = invert(R, a)
    assert R.mul(a, b) == 1
    assert invert(R, b) == a


@pytest.mark.parametrize("spec", CATALOG)
def test_nonunits_have_index_p(spec: str) -> None:
    R = ring_from_text(spec)
    check = verify_ring(R).check("ring.nonunit_index_p")
    assert check.status == "pass"
    nonunits = [a for a in enumerate_elements(R) if not is_unit(R, a)]
    assert R.size == R.spec.p * len(nonunits)
