from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from .errors import SchemaError
from .moufang import FinMoufang, build_from_U_tau
from .util import dumps_stable

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def moufang_to_dict(M: FinMoufang) -> Dict[str, Any]:
    """Moufang data in the exchange format; `inf` pins ∞ explicitly."""
    classes = [np.flatnonzero(M.class_of == c).tolist() for c in range(M.n_classes)]
    return {
        "schema": SCHEMA_VERSION,
        "points": list(M.labels),
        "classes": classes,
        "u_inf": M.u_inf.tolist(),
        "tau": M.tau.tolist(),
        "inf": M.inf,
    }


def moufang_dumps(M: FinMoufang) -> str:
    return dumps_stable(moufang_to_dict(M))


def _int_list(value: Any, where: str) -> List[int]:
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise SchemaError("expected a list of integers", where)
    return value


def moufang_from_dict(data: Any) -> FinMoufang:
    if not isinstance(data, dict):
        raise SchemaError("expected an object")
    version = data.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {version!r}", "$.schema")
    for key in ("points", "classes", "u_inf", "tau"):
        if key not in data:
            raise SchemaError(f"missing key {key!r}")

    points = data["points"]
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise SchemaError("expected a list of point labels", "$.points")
    if len(set(points)) != len(points):
        raise SchemaError("duplicate point label", "$.points")
    P = len(points)

    if not isinstance(data["classes"], list):
        raise SchemaError("expected a list of classes", "$.classes")
    classes = [_int_list(c, f"$.classes[{i}]") for i, c in enumerate(data["classes"])]

    if not isinstance(data["u_inf"], list) or not data["u_inf"]:
        raise SchemaError("expected a non-empty list of permutation tables", "$.u_inf")
    u_inf = [_int_list(row, f"$.u_inf[{i}]") for i, row in enumerate(data["u_inf"])]
    for i, row in enumerate(u_inf):
        if sorted(row) != list(range(P)):
            raise SchemaError("not a bijection of the points", f"$.u_inf[{i}]")

    tau = _int_list(data["tau"], "$.tau")
    if sorted(tau) != list(range(P)):
        raise SchemaError("not a bijection of the points", "$.tau")

    inf = data.get("inf")
    if inf is not None and (not isinstance(inf, int) or not 0 <= inf < P):
        raise SchemaError("expected a point index", "$.inf")

    return build_from_U_tau(points, classes, u_inf, tau, inf=inf)


def parse_moufang_file(path: Path | str) -> FinMoufang:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None
    M = moufang_from_dict(data)
    logger.info("loaded %r from %s", M, path)
    return M


def write_moufang_file(M: FinMoufang, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(moufang_dumps(M), encoding="utf-8")
    return path
