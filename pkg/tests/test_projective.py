from __future__ import annotations

from typing import Dict

import numpy as np
import pytest

from local_moufang.catalog import CATALOG, catalog_pair, default_e
from local_moufang.errors import ENotInvertible
from local_moufang.models import ProjPoint
from local_moufang.projective import (
    AFFINE,
    RADICAL,
    ProjectiveSpace,
    build_moufang_from_pair,
    canonicalize,
    enumerate_points,
    mu_perm,
    verify_projective_space,
)


@pytest.fixture(scope="module")
def spaces() -> Dict[str, ProjectiveSpace]:
    out = {}
    for spec in CATALOG:
        V = catalog_pair(spec)
        out[spec] = ProjectiveSpace(V, default_e(V))
    return out


@pytest.mark.parametrize(
    "spec, points, classes",
    [("zmod:5:2", 30, 6), ("zmod:4:1", 6, 3), ("zmod:5:1", 6, 6), ("poly:5:2", 30, 6)],
)
def test_point_and_class_counts(
    spaces: Dict[str, ProjectiveSpace], spec: str, points: int, classes: int
) -> None:
    space = spaces[spec]
    assert len(space) == points
    assert len(space.classes()) == classes
    assert len(space) == space.plus.size + int(space.rad_minus.sum())


def test_enumerate_points_order() -> None:
    V = catalog_pair("zmod:4:1")
    pts = enumerate_points(V, 1)
    assert pts[:4] == [ProjPoint(AFFINE, x) for x in range(4)]
    assert pts[4:] == [ProjPoint(RADICAL, 0), ProjPoint(RADICAL, 2)]


def test_canonicalize_z4() -> None:
    V = catalog_pair("zmod:4:1")
    assert canonicalize(V, 1, 1, 1) == ProjPoint(RADICAL, 0)
    assert canonicalize(V, 1, 2, 1) == ProjPoint(AFFINE, 2)


def test_proj_equivalence_z4(spaces: Dict[str, ProjectiveSpace]) -> None:
    space = spaces["zmod:4:1"]
    assert space.proj_equivalent((3, 1), space.expand(space.canonicalize(3, 1)))
    assert not space.proj_equivalent((1, 0), (2, 0))


def test_e_must_be_invertible() -> None:
    with pytest.raises(ENotInvertible):
        ProjectiveSpace(catalog_pair("zmod:5:2"), 5)


def test_mu_on_affine_points(spaces: Dict[str, ProjectiveSpace]) -> None:
    space = spaces["zmod:5:1"]
    assert mu_perm(space, 1)(2) == 2
    assert mu_perm(space, 2)(2) == 3
    for v in (1, 2, 3, 4):
        mu = mu_perm(space, v)
        assert (mu * mu).is_identity()
        assert mu(space.zero) == space.inf


def test_offset_point_covers_every_y(spaces: Dict[str, ProjectiveSpace]) -> None:
    space = spaces["zmod:5:2"]
    offsets = space.offset_point(space.minus.elements())
    assert len(np.unique(offsets)) == space.minus.size
    # [1, 1 + 0] is infinity
    assert space.offset_point(0) == space.inf


@pytest.mark.parametrize("spec", CATALOG)
def test_projective_suite(spaces: Dict[str, ProjectiveSpace], spec: str) -> None:
    report = verify_projective_space(spaces[spec])
    assert report.passed, report.failures()


def test_build_moufang_from_pair_basics() -> None:
    V = catalog_pair("zmod:5:2")
    M = build_moufang_from_pair(V, 1)
    assert M.size == 30
    assert M.n_classes == 6
    assert M.labels[M.inf] == "R:0"
    assert M.labels[M.zero] == "A:0"
    assert len(M.units) == 20
