from __future__ import annotations

import json
import logging
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .models import FAIL, PASS, SKIP, Check

logger = logging.getLogger(__name__)

Labeler = Callable[[int], str]
# (variable name, candidate values, label function for witnesses)
Domain = Tuple[str, np.ndarray, Labeler]


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def dumps_stable(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False, default=_plain) + "\n"


def domain(name: str, values: Sequence[int] | np.ndarray, labeler: Labeler) -> Domain:
    return (name, np.asarray(values, dtype=np.int64), labeler)


def sweep(
    name: str,
    fn: Callable[..., Any],
    domains: Sequence[Domain],
    *,
    note: Optional[str] = None,
) -> Check:
    """Exhaustively evaluate an identity and report the first counterexample.

    `fn` receives one value of the first domain as an int and the remaining
    domains as sparse broadcastable grids. It returns a boolean array telling
    where the identity holds, or a pair `(holds, mask)` where `mask` marks the
    tuples inside the quantified domain. The first failing tuple in
    lexicographic enumeration order becomes the witness.
    """
    if not domains:
        raise ValueError("sweep needs at least one domain")
    first_name, first_values, first_label = domains[0]
    rest = list(domains[1:])
    shape = tuple(len(vals) for _, vals, _ in rest)
    grids = np.meshgrid(*[vals for _, vals, _ in rest], indexing="ij", sparse=True) if rest else []

    if len(first_values) == 0 or any(s == 0 for s in shape):
        return Check(name, PASS, note=note or "vacuous")

    for v in first_values:
        out = fn(int(v), *grids)
        if isinstance(out, tuple):
            holds, mask = out
            bad = ~np.asarray(holds, dtype=bool) & np.asarray(mask, dtype=bool)
        else:
            bad = ~np.asarray(out, dtype=bool)
        bad = np.broadcast_to(bad, shape)
        hit = np.argwhere(bad)
        if hit.size:
            pos = hit[0]
            witness = {first_name: first_label(int(v))}
            for (var, vals, label), j in zip(rest, pos):
                witness[var] = label(int(vals[j]))
            logger.debug("check %s failed at %s", name, witness)
            return Check(name, FAIL, witness, note)
    return Check(name, PASS, note=note)


def skipped(name: str, reason: str) -> Check:
    return Check(name, SKIP, note=reason)


def failed(name: str, witness: Optional[Dict[str, str]] = None, note: Optional[str] = None) -> Check:
    return Check(name, FAIL, witness or {}, note)


def verdict(name: str, ok: bool, witness: Optional[Dict[str, str]] = None, note: Optional[str] = None) -> Check:
    return Check(name, PASS, note=note) if ok else Check(name, FAIL, witness or {}, note)


def inverse_rows(tables: np.ndarray) -> np.ndarray:
    """Row-wise inverse of a stack of permutation tables."""
    tables = np.asarray(tables)
    out = np.empty_like(tables)
    rows = np.arange(tables.shape[0])[:, None]
    out[rows, tables] = np.arange(tables.shape[1])[None, :]
    return out


def is_permutation(table: np.ndarray, n: int) -> bool:
    table = np.asarray(table)
    if table.shape != (n,):
        return False
    return bool(np.array_equal(np.sort(table), np.arange(n)))


def row_keys(tables: np.ndarray) -> list[bytes]:
    arr = np.ascontiguousarray(tables, dtype=np.int64)
    return [row.tobytes() for row in arr]
