from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from local_moufang.errors import CapExceeded
from local_moufang.perm import (
    Perm,
    closure,
    conj_rows,
    induced_on_classes,
    is_group,
    partition_violation,
    stack,
)

perms5 = st.permutations(list(range(5))).map(Perm)


def test_product_acts_on_the_right() -> None:
    p = Perm([1, 2, 0])
    q = Perm([0, 2, 1])
    # x(pq) = (xp)q
    assert [(p * q)(x) for x in range(3)] == [q(p(x)) for x in range(3)]
    assert (p * q).tolist() == [2, 1, 0]


def test_rejects_non_permutation() -> None:
    with pytest.raises(ValueError):
        Perm([0, 0, 1])


@given(p=perms5, h=perms5)
def test_conjugation_matches_row_helper(p: Perm, h: Perm) -> None:
    assert p.conj(h) == h.inverse() * p * h
    assert conj_rows(stack([p]), h.table)[0].tolist() == p.conj(h).tolist()


@given(p=perms5)
def test_order_and_inverse(p: Perm) -> None:
    assert (p ** p.order()).is_identity()
    assert (p * p.inverse()).is_identity()
    assert p ** -1 == p.inverse()


def test_closure_of_s3_generators() -> None:
    gens = np.array([[1, 0, 2], [1, 2, 0]])
    G = closure(gens, cap=10)
    assert len(G) == 6
    assert is_group(G)
    with pytest.raises(CapExceeded):
        closure(gens, cap=4)


def test_is_group_needs_identity_and_closure() -> None:
    rows = np.array([list(p) for p in itertools.permutations(range(3))])
    assert is_group(rows)
    assert not is_group(rows[1:])
    assert not is_group(np.array([[0, 1, 2], [1, 2, 0]]))


def test_partition_checks() -> None:
    class_of = np.array([0, 0, 1, 1])
    swap_blocks = np.array([[2, 3, 0, 1]])
    mix = np.array([[0, 2, 1, 3]])
    assert partition_violation(swap_blocks, class_of) is None
    assert partition_violation(mix, class_of) == 0
    assert induced_on_classes(swap_blocks, class_of).tolist() == [[1, 0]]
