from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from local_moufang.catalog import catalog_pair
from local_moufang.errors import ConstructionError, SchemaError
from local_moufang.moufang import FinMoufang
from local_moufang.projective import build_moufang_from_pair
from local_moufang.serialize import (
    moufang_dumps,
    moufang_from_dict,
    moufang_to_dict,
    parse_moufang_file,
    write_moufang_file,
)


@pytest.fixture(scope="module")
def m_z5() -> FinMoufang:
    return build_moufang_from_pair(catalog_pair("zmod:5:1"), 1)


def test_export_import_is_a_fixed_point(m_z5: FinMoufang, tmp_path: Path) -> None:
    path = write_moufang_file(m_z5, tmp_path / "z5.json")
    again = parse_moufang_file(path)
    assert again.labels == m_z5.labels
    assert again.inf == m_z5.inf
    assert np.array_equal(again.u_inf, m_z5.u_inf)
    assert np.array_equal(again.mu, m_z5.mu)
    assert moufang_dumps(again) == path.read_text(encoding="utf-8")


def test_schema_keys(m_z5: FinMoufang) -> None:
    data = moufang_to_dict(m_z5)
    assert list(data) == ["schema", "points", "classes", "u_inf", "tau", "inf"]
    assert data["schema"] == 1
    assert data["points"][m_z5.inf] == "R:0"


def test_inf_is_optional(m_z5: FinMoufang) -> None:
    data = moufang_to_dict(m_z5)
    del data["inf"]
    del data["schema"]
    assert moufang_from_dict(data).inf == m_z5.inf


def test_non_bijective_tau_is_a_schema_error(m_z5: FinMoufang) -> None:
    data = moufang_to_dict(m_z5)
    data["tau"] = [0] * len(data["tau"])
    with pytest.raises(SchemaError) as err:
        moufang_from_dict(data)
    assert err.value.location == "$.tau"


@pytest.mark.parametrize(
    "patch, location",
    [
        ({"schema": 2}, "$.schema"),
        ({"points": "abc"}, "$.points"),
        ({"u_inf": [[0, 1]]}, "$.u_inf[0]"),
        ({"classes": [[0, "x"]]}, "$.classes[0]"),
        ({"inf": 99}, "$.inf"),
    ],
)
def test_schema_error_locations(m_z5: FinMoufang, patch: dict, location: str) -> None:
    data = {**moufang_to_dict(m_z5), **patch}
    with pytest.raises(SchemaError) as err:
        moufang_from_dict(data)
    assert err.value.location == location


def test_two_classes_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "two.json"
    data = {"points": ["a", "b"], "classes": [[0], [1]], "u_inf": [[0, 1]], "tau": [1, 0]}
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(ConstructionError, match="need more than 2 classes"):
        parse_moufang_file(path)


def test_malformed_json(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError, match="malformed JSON"):
        parse_moufang_file(path)


def test_partition_failure_is_a_construction_error(m_z5: FinMoufang) -> None:
    data = moufang_to_dict(m_z5)
    data["classes"] = [[0, 1], [2, 3], [4, 5]]
    with pytest.raises(ConstructionError):
        moufang_from_dict(data)


def test_missing_key(m_z5: FinMoufang) -> None:
    data = moufang_to_dict(m_z5)
    del data["u_inf"]
    with pytest.raises(SchemaError, match="missing key 'u_inf'") as err:
        moufang_from_dict(data)
    assert err.value.location == "$"
