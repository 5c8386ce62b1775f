from __future__ import annotations

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ENotInvertible, InvariantViolation, NotInvertible
from .jordan import JordanPair
from .models import Check, ProjPoint, VerifyReport
from .perm import Perm, partition_violation
from .util import domain, sweep, verdict

logger = logging.getLogger(__name__)

AFFINE = "A"
RADICAL = "R"


class ProjectiveSpace:
    """P(V) for a local Jordan pair V and an invertible e ∈ V⁺.

    Points are canonical: Affine(x) = [x,0] for every x ∈ V⁺, and
    RadOffset(y) = [e, e^{-1}+y] for y ∈ Rad V⁻ only.
    """

    def __init__(self, pair: JordanPair, e: int) -> None:
        self.pair = pair
        self.e = int(e)
        if not pair.invertible(0)[self.e]:
            raise ENotInvertible(f"e={pair.modules[0].label(self.e)} is not invertible in V+")
        self.e_inv = int(pair.inverse_table(0)[self.e])
        self.plus, self.minus = pair.modules
        self.rad_plus = pair.radical_mask(0)
        self.rad_minus = pair.radical_mask(1)
        self.points: List[ProjPoint] = [ProjPoint(AFFINE, int(x)) for x in self.plus.elements()]
        self.points += [ProjPoint(RADICAL, int(y)) for y in np.flatnonzero(self.rad_minus)]
        self.index: Dict[ProjPoint, int] = {p: i for i, p in enumerate(self.points)}
        self._radical_index = np.full(self.minus.size, -1, dtype=np.int64)
        for i, p in enumerate(self.points):
            if p.form == RADICAL:
                self._radical_index[p.value] = i
        self.class_of = self._classes()
        self._cache: Dict[Tuple[str, int], np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.points)

    @property
    def zero(self) -> int:
        return self.index[ProjPoint(AFFINE, self.plus.zero)]

    @property
    def inf(self) -> int:
        return self.index[ProjPoint(RADICAL, self.minus.zero)]

    def label(self, i: int) -> str:
        p = self.points[int(i)]
        m = self.plus if p.form == AFFINE else self.minus
        return f"{p.form}:{m.label(p.value)}"

    def labels(self) -> List[str]:
        return [self.label(i) for i in range(len(self.points))]

    def _classes(self) -> np.ndarray:
        rad = np.flatnonzero(self.rad_plus)
        els = self.plus.elements()
        coset_key = self.plus.add_table[els][:, rad].min(axis=1)
        n_aff = self.plus.size
        out = np.empty(len(self.points), dtype=np.int64)
        _, first = np.unique(coset_key, return_index=True)
        order = {int(coset_key[i]): c for c, i in enumerate(sorted(first))}
        out[:n_aff] = [order[int(k)] for k in coset_key]
        out[n_aff:] = len(order)
        return out

    def classes(self) -> List[List[int]]:
        n = int(self.class_of.max()) + 1
        return [np.flatnonzero(self.class_of == c).tolist() for c in range(n)]

    # Point arithmetic on indices.

    def offset_point(self, y):
        """Index of the canonical form of [e, e^{-1}+y] for any y ∈ V⁻."""
        y = np.asarray(y)
        inv = self.pair.inverse_table(1)
        out = np.where(self.rad_minus[y], self._radical_index[y], self.plus.neg(inv[y]))
        return int(out) if out.ndim == 0 else out

    def canonicalize(self, x: int, y: int) -> ProjPoint:
        qi = self.pair.qi_table(0)
        if qi[x, y]:
            return ProjPoint(AFFINE, int(self.pair.quasi_inverse_table(0)[x, y]))
        x_inv = int(self.pair.inverse_table(0)[x])
        if x_inv < 0:
            raise InvariantViolation(
                f"({self.plus.label(x)}, {self.minus.label(y)}) is neither quasi-invertible "
                "nor has invertible x; the pair is not local"
            )
        t = int(self.minus.sub(y, x_inv))
        if not self.rad_minus[t]:
            raise InvariantViolation(f"offset {self.minus.label(t)} is not radical")
        return ProjPoint(RADICAL, t)

    def expand(self, p: ProjPoint) -> Tuple[int, int]:
        if p.form == AFFINE:
            return p.value, self.minus.zero
        return self.e, int(self.minus.add(self.e_inv, p.value))

    def proj_equivalent(self, a: Tuple[int, int], b: Tuple[int, int]) -> bool:
        (x, y), (x2, y2) = a, b
        d = int(self.minus.sub(y, y2))
        return bool(
            self.pair.qi_table(0)[x, d] and self.pair.quasi_inverse_table(0)[x, d] == x2
        )

    def rad_equivalent(self, p: ProjPoint, q: ProjPoint) -> bool:
        if p.form != q.form:
            return False
        if p.form == AFFINE:
            return bool(self.rad_plus[self.plus.sub(p.value, q.value)])
        return bool(self.rad_minus[self.minus.sub(p.value, q.value)])

    # Permutation tables.

    def _split(self) -> Tuple[np.ndarray, np.ndarray]:
        n_aff = self.plus.size
        xs = np.arange(n_aff)
        ys = np.array([p.value for p in self.points[n_aff:]], dtype=np.int64)
        return xs, ys

    def alpha_table(self, v: int) -> np.ndarray:
        key = ("alpha", int(v))
        if key not in self._cache:
            xs, ys = self._split()
            img_r = self.pair.quasi_inverse_table(1)[ys, v]
            if len(ys) and not np.all(self.rad_minus[img_r]):
                raise InvariantViolation("alpha leaves the radical offsets")
            self._cache[key] = np.concatenate([self.plus.add(xs, v), self._radical_index[img_r]])
        return self._cache[key]

    def zeta_table(self, w: int) -> np.ndarray:
        key = ("zeta", int(w))
        if key not in self._cache:
            xs, ys = self._split()
            inv_plus = self.pair.inverse_table(0)
            rad_x = self.rad_plus[xs]
            via_qi = self.pair.quasi_inverse_table(0)[xs, w]
            via_offset = self.offset_point(self.minus.add(self.minus.neg(inv_plus[xs]), w))
            affine_img = np.where(rad_x, via_qi, via_offset)
            radical_img = self.offset_point(self.minus.add(ys, w)) if len(ys) else ys
            self._cache[key] = np.concatenate([affine_img, radical_img]).astype(np.int64)
        return self._cache[key]

    def mu_closed_table(self, v: int) -> np.ndarray:
        pair = self.pair
        xs, ys = self._split()
        q = pair.q[0]
        x_img_rad = self._radical_index[pair.q_inverse_rows(0)[v, xs]]
        x_img_inv = self.plus.neg(q[v, pair.inverse_table(0)[xs]])
        affine_img = np.where(self.rad_plus[xs], x_img_rad, x_img_inv)
        return np.concatenate([affine_img, q[v, ys]]).astype(np.int64)

    def mu_composite_table(self, v: int) -> np.ndarray:
        z = self.zeta_table(int(self.pair.inverse_table(0)[v]))
        a = self.alpha_table(v)
        return z[a[z]]

    def mu_table(self, v: int) -> np.ndarray:
        key = ("mu", int(v))
        if key not in self._cache:
            if not self.pair.invertible(0)[v]:
                raise NotInvertible(f"{self.plus.label(v)} is not invertible")
            closed = self.mu_closed_table(v)
            if not np.array_equal(closed, self.mu_composite_table(v)):
                raise InvariantViolation(f"closed-form mu_{self.plus.label(v)} != zeta alpha zeta")
            if not np.array_equal(closed[closed], np.arange(len(closed))):
                raise InvariantViolation(f"mu_{self.plus.label(v)} is not an involution")
            self._cache[key] = closed
        return self._cache[key]


def enumerate_points(V: JordanPair, e: int) -> List[ProjPoint]:
    return list(ProjectiveSpace(V, e).points)


def canonicalize(V: JordanPair, e: int, x: int, y: int) -> ProjPoint:
    return ProjectiveSpace(V, e).canonicalize(x, y)


def alpha_perm(space: ProjectiveSpace, v: int) -> Perm:
    return Perm(space.alpha_table(v))


def zeta_perm(space: ProjectiveSpace, w: int) -> Perm:
    return Perm(space.zeta_table(w))


def mu_perm(space: ProjectiveSpace, v: int) -> Perm:
    return Perm(space.mu_table(v))


def verify_projective_space(space: ProjectiveSpace) -> VerifyReport:
    pair = space.pair
    plus, minus = space.plus, space.minus
    P = len(space)
    n_plus, n_minus = plus.size, minus.size
    units = np.flatnonzero(pair.invertible(0))
    checks: List[Check] = []

    expected = n_plus + int(space.rad_minus.sum())
    checks.append(verdict("pv.count", P == expected, {"points": str(P), "expected": str(expected)}))

    bad: Optional[Dict[str, str]] = None
    for x in range(n_plus):
        for y in range(n_minus):
            p = space.canonicalize(x, y)
            ok = space.proj_equivalent((x, y), space.expand(p)) and space.canonicalize(*space.expand(p)) == p
            if not ok:
                bad = {"x": plus.label(x), "y": minus.label(y)}
                break
        if bad:
            break
    checks.append(verdict("pv.canonicalize_consistent", bad is None, bad))

    A = np.array([space.alpha_table(v) for v in range(n_plus)])
    Z = np.array([space.zeta_table(w) for w in range(n_minus)])
    M = {int(v): space.mu_closed_table(int(v)) for v in units}

    def alpha_morphism(v, v2):
        return np.all(A[v2][:, A[v]] == A[plus.add(v, v2)], axis=-1)

    def zeta_morphism(w, w2):
        return np.all(Z[w2][:, Z[w]] == Z[minus.add(w, w2)], axis=-1)

    checks.append(sweep("pv.alpha_morphism", alpha_morphism, [domain("v", plus.elements(), plus.label)] * 2))
    checks.append(sweep("pv.zeta_morphism", zeta_morphism, [domain("w", minus.elements(), minus.label)] * 2))

    for name, rows, lab in (
        ("alpha", A, plus.label),
        ("zeta", Z, minus.label),
        ("mu", np.array([M[int(v)] for v in units]).reshape(len(units), P), lambda i: plus.label(units[i])),
    ):
        hit = partition_violation(rows, space.class_of)
        checks.append(verdict(f"pv.{name}_preserves_equivalence", hit is None, {"v": lab(hit)} if hit is not None else None))

    ident = np.arange(P)
    mu_bad = mu_inv_bad = cons_bad = t_bad = None
    for v in units:
        v = int(v)
        closed = M[v]
        if mu_bad is None and not np.array_equal(closed, space.mu_composite_table(v)):
            mu_bad = {"v": plus.label(v)}
        if mu_inv_bad is None and not np.array_equal(closed[closed], ident):
            mu_inv_bad = {"v": plus.label(v)}
        if cons_bad is None:
            ys = minus.elements()
            xs = plus.elements()
            y_ok = closed[space.offset_point(ys)] == pair.q[0][v, ys]
            x_ok = closed[xs] == space.offset_point(pair.q_inverse_rows(0)[v, xs])
            if not (np.all(y_ok) and np.all(x_ok)):
                cons_bad = {"v": plus.label(v)}
        if t_bad is None and closed[v] != plus.neg(v):
            t_bad = {"t": plus.label(v)}
    checks.append(verdict("pv.mu_closed_equals_composite", mu_bad is None, mu_bad))
    checks.append(verdict("pv.mu_involution", mu_inv_bad is None, mu_inv_bad))
    checks.append(verdict("pv.mu_consolidated_forms", cons_bad is None, cons_bad))
    checks.append(verdict("pv.mu_t_affine_t", t_bad is None, t_bad))

    q_inv_rows = pair.q_inverse_rows(0)

    def dictionary(t, v):
        mu = M[t]
        conj = mu[A[v][:, mu]]  # mu^{-1} alpha_v mu with mu an involution
        return np.all(conj == Z[q_inv_rows[t, v]], axis=-1)

    checks.append(
        sweep(
            "pv.dictionary",
            dictionary,
            [domain("t", units, plus.label), domain("v", plus.elements(), plus.label)],
        )
    )

    if space.e in M:
        tau = M[space.e]

        def special(t):
            image = tau[t]  # units map to affine units
            return np.asarray(tau[plus.neg(t)] == plus.neg(image))

        checks.append(sweep("pv.special", special, [domain("t", units, plus.label)]))

    facts = {
        "points": P,
        "classes": int(space.class_of.max()) + 1,
        "radical_sizes": [int(space.rad_plus.sum()), int(space.rad_minus.sum())],
        "e": plus.label(space.e),
    }
    logger.info("projective space checked: %d points", P)
    return VerifyReport.assemble(f"projective-space {pair.name}", checks, facts)


def build_moufang_from_pair(V: JordanPair, e: int):
    """M(V): U_∞ = {α_v}, τ = μ_e, ∞ = [e, e^{-1}], 0 = [0, 0]."""
    from .moufang import build_from_U_tau

    space = ProjectiveSpace(V, e)
    u_inf = np.array([space.alpha_table(v) for v in range(space.plus.size)])
    M = build_from_U_tau(
        space.labels(), space.classes(), u_inf, space.mu_table(space.e), inf=space.inf
    )
    M.space = space
    return M
