from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import CapExceeded

logger = logging.getLogger(__name__)


class Perm:
    """A permutation of {0, ..., n-1} acting on the right.

    `p * q` means "first p, then q", so x(pq) = (xp)q, and conjugation is
    p^h = h^{-1} p h.
    """

    __slots__ = ("table", "_key")

    def __init__(self, table: Sequence[int] | np.ndarray, *, check: bool = True) -> None:
        arr = np.array(table, dtype=np.int64)
        if check and (arr.ndim != 1 or not np.array_equal(np.sort(arr), np.arange(len(arr)))):
            raise ValueError("table is not a permutation")
        arr.setflags(write=False)
        self.table = arr
        self._key = arr.tobytes()

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(np.arange(n), check=False)

    def __len__(self) -> int:
        return len(self.table)

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(other.table[self.table], check=False)

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(len(self.table))
        return Perm(inv, check=False)

    def __pow__(self, n: int) -> "Perm":
        base = self if n >= 0 else self.inverse()
        out = Perm.identity(len(self))
        for _ in range(abs(n)):
            out = out * base
        return out

    def conj(self, h: "Perm") -> "Perm":
        return h.inverse() * self * h

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.table, np.arange(len(self.table))))

    def order(self) -> int:
        p, k = self, 1
        while not p.is_identity():
            p, k = p * self, k + 1
        return k

    @property
    def key(self) -> bytes:
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Perm) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"Perm({self.table.tolist()})"

    def tolist(self) -> List[int]:
        return [int(v) for v in self.table]


def stack(perms: Iterable[Perm]) -> np.ndarray:
    rows = [p.table for p in perms]
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1)


def conj_rows(rows: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Conjugate every row of a permutation stack by the table g: u ↦ g^{-1} u g."""
    g = np.asarray(g)
    ginv = np.empty_like(g)
    ginv[g] = np.arange(len(g))
    return g[np.asarray(rows)[:, ginv]]


def row_set(rows: np.ndarray) -> frozenset:
    arr = np.ascontiguousarray(rows, dtype=np.int64)
    return frozenset(r.tobytes() for r in arr)


def is_group(rows: np.ndarray) -> bool:
    """Identity present, closed under composition (finite, so inverses follow)."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[1]
    keys = row_set(rows)
    if np.arange(n, dtype=np.int64).tobytes() not in keys:
        return False
    for g in rows:
        prods = rows[:, g]  # row j is g then rows[j]
        if not row_set(prods) <= keys:
            return False
    return True


def closure(generators: np.ndarray, cap: int) -> np.ndarray:
    """Breadth-first closure of a generating set; raises CapExceeded past `cap` elements."""
    generators = np.asarray(generators, dtype=np.int64)
    n = generators.shape[1]
    ident = np.arange(n, dtype=np.int64)
    seen: Dict[bytes, np.ndarray] = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        fresh = []
        for g in frontier:
            for row in generators[:, g]:
                key = row.tobytes()
                if key in seen:
                    continue
                seen[key] = row
                fresh.append(row)
                if len(seen) > cap:
                    raise CapExceeded(f"group closure exceeded cap {cap}")
        frontier = fresh
        logger.debug("closure: %d elements so far", len(seen))
    return np.array(list(seen.values()), dtype=np.int64)


def partition_violation(rows: np.ndarray, class_of: np.ndarray) -> Optional[int]:
    """Index of the first row that does not permute the classes of `class_of`, if any."""
    class_of = np.asarray(class_of)
    n_cls = int(class_of.max()) + 1
    reps = np.array([int(np.flatnonzero(class_of == c)[0]) for c in range(n_cls)])
    for i, t in enumerate(np.asarray(rows)):
        img = class_of[t]
        induced = img[reps]
        if not np.array_equal(img, induced[class_of]) or len(np.unique(induced)) != n_cls:
            return i
    return None


def induced_on_classes(rows: np.ndarray, class_of: np.ndarray) -> np.ndarray:
    """The class permutations induced by a stack of partition-preserving rows."""
    class_of = np.asarray(class_of)
    n_cls = int(class_of.max()) + 1
    reps = np.array([int(np.flatnonzero(class_of == c)[0]) for c in range(n_cls)])
    return class_of[np.asarray(rows)[:, reps]]
