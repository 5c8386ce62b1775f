from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ConstructionError,
    HypothesisFailed,
    InvariantViolation,
    NoSolution,
    NotUnique,
    NotUnit,
    SideViolation,
)
from .models import Check, GroupSummary, VerifyReport
from .perm import (
    Perm,
    closure,
    conj_rows,
    induced_on_classes,
    is_group,
    partition_violation,
    row_set,
)
from .util import domain, inverse_rows, sweep, verdict

logger = logging.getLogger(__name__)

DEFAULT_GROUP_CAP = 200_000


class FinMoufang:
    """A finite local Moufang set candidate M(U, τ) with its derived tables.

    Points are indices 0..P-1. Derived maps are stored as dense (P, P)
    arrays whose row x is the permutation attached to the point x; rows
    outside the domain of the map are filled with -1.

    alpha[x]  α_x, the element of U_∞ with 0 ↦ x            (x ≁ ∞)
    gamma[x]  γ_x = α_x^τ                                    (x ≁ ∞)
    beta[y]   the element of U_0 with ∞ ↦ y                  (y ≁ 0)
    mu[x]     μ_x = γ_{(−x)τ^{-1}} α_x γ_{−(xτ^{-1})}        (x a unit)
    """

    def __init__(
        self,
        labels: Sequence[str],
        class_of: np.ndarray,
        u_inf: np.ndarray,
        tau: np.ndarray,
        inf: int,
    ) -> None:
        self.labels = tuple(labels)
        self.size = P = len(self.labels)
        self.class_of = _frozen(class_of)
        self.u_inf = _frozen(u_inf)
        self.tau = _frozen(tau)
        self.tau_inv = _frozen(np.argsort(self.tau))
        self.inf = int(inf)
        self.zero = int(self.tau[self.inf])
        self.space = None  # set when built from a projective space

        cls = self.class_of
        self.not_inf = _frozen(cls != cls[self.inf])
        self.not_zero = _frozen(cls != cls[self.zero])
        self.unit_mask = _frozen(self.not_inf & self.not_zero)
        self.units = _frozen(np.flatnonzero(self.unit_mask))
        self.n_classes = int(cls.max()) + 1

        self.u_zero = _frozen(conj_rows(self.u_inf, self.tau))

        self.alpha = _frozen(_rows_by_image(self.u_inf, self.zero, P))
        self.gamma = _frozen(_conj_table_rows(self.alpha, self.tau, self.not_inf))
        self.beta = _frozen(_rows_by_image(self.u_zero, self.inf, P))

        neg = np.full(P, -1, dtype=np.int64)
        rows = np.flatnonzero(self.not_inf)
        neg[rows] = inverse_rows(self.alpha[rows])[:, self.zero]
        self.neg = _frozen(neg)

        neg_t = np.full(P, -1, dtype=np.int64)
        rows = np.flatnonzero(self.not_zero)
        neg_t[rows] = inverse_rows(self.beta[rows])[:, self.inf]
        self.neg_tilde = _frozen(neg_t)

        mu = np.full((P, P), -1, dtype=np.int64)
        U = self.units
        if len(U):
            g1 = self.gamma[self.tau_inv[self.neg[U]]]
            g2 = self.gamma[self.neg[self.tau_inv[U]]]
            a = self.alpha[U]
            step = np.take_along_axis(a, g1, axis=1)
            mu[U] = np.take_along_axis(g2, step, axis=1)
        self.mu = _frozen(mu)
        self._cache: Dict[Tuple[str, int], np.ndarray] = {}

    def __repr__(self) -> str:
        return f"FinMoufang(points={self.size}, classes={self.n_classes})"

    def label(self, x: int) -> str:
        return self.labels[int(x)]

    def is_unit(self, x: int) -> bool:
        return bool(self.unit_mask[x])

    def root_group(self, x: int) -> np.ndarray:
        """U_x as a stack of tables."""
        if self.not_inf[x]:
            return conj_rows(self.u_zero, self.alpha[x])
        return conj_rows(self.u_inf, self.gamma[self.tau_inv[x]])

    def tilde(self, x):
        """∼x = −((−x)μ_x)."""
        return self.neg[self.mu[x, self.neg[x]]]

    def scalar_table(self, n: int, *, tilde: bool = False) -> np.ndarray:
        """x ↦ x·n (or x·̃n) over its domain, -1 elsewhere."""
        key = ("scalar~" if tilde else "scalar", int(n))
        if key not in self._cache:
            maps = self.beta if tilde else self.alpha
            dom = self.not_zero if tilde else self.not_inf
            start = self.inf if tilde else self.zero
            xs = np.flatnonzero(dom)
            p = np.full(len(xs), start, dtype=np.int64)
            for _ in range(n):
                p = maps[xs, p]
            out = np.full(self.size, -1, dtype=np.int64)
            out[xs] = p
            self._cache[key] = out
        return self._cache[key]

    def division_table(self, n: int, *, tilde: bool = False) -> np.ndarray:
        """x ↦ the unique y with y·n = x; raises NoSolution or NotUnique."""
        key = ("divide~" if tilde else "divide", int(n))
        if key not in self._cache:
            dom = np.flatnonzero(self.not_zero if tilde else self.not_inf)
            table = self.scalar_table(n, tilde=tilde)
            out = np.full(self.size, -1, dtype=np.int64)
            images = table[dom]
            counts = np.bincount(images, minlength=self.size)
            if np.any(counts[dom] > 1):
                x = dom[np.flatnonzero(counts[dom] > 1)[0]]
                raise NotUnique(f"{self.label(x)} has several {n}-th parts")
            if np.any(counts[dom] == 0):
                x = dom[np.flatnonzero(counts[dom] == 0)[0]]
                raise NoSolution(f"{self.label(x)} has no {n}-th part")
            out[images] = dom
            self._cache[key] = out
        return self._cache[key]


def _frozen(a) -> np.ndarray:
    arr = np.array(a)
    arr.setflags(write=False)
    return arr


def _rows_by_image(rows: np.ndarray, point: int, P: int) -> np.ndarray:
    """Table whose row y is the unique row of `rows` mapping `point` to y."""
    out = np.full((P, P), -1, dtype=np.int64)
    out[rows[:, point]] = rows
    return out


def _conj_table_rows(table: np.ndarray, g: np.ndarray, mask: np.ndarray) -> np.ndarray:
    out = np.full_like(table, -1)
    rows = np.flatnonzero(mask)
    if len(rows):
        out[rows] = conj_rows(table[rows], g)
    return out


# Construction.


def _class_array(classes: Sequence[Sequence[int]], P: int) -> np.ndarray:
    class_of = np.full(P, -1, dtype=np.int64)
    for c, members in enumerate(classes):
        for x in members:
            if not 0 <= int(x) < P:
                raise ConstructionError("partition", f"point {x} out of range", {"class": str(c)})
            if class_of[int(x)] != -1:
                raise ConstructionError("partition", f"point {x} in two classes", {"point": str(x)})
            class_of[int(x)] = c
    missing = np.flatnonzero(class_of < 0)
    if len(missing):
        raise ConstructionError("partition", "point in no class", {"point": str(int(missing[0]))})
    return class_of


def build_from_U_tau(
    points: Sequence[str],
    classes: Sequence[Sequence[int]],
    u_inf: Sequence[Sequence[int]] | np.ndarray,
    tau: Sequence[int] | np.ndarray,
    *,
    inf: Optional[int] = None,
) -> FinMoufang:
    """Validate C1, C1', C2 and derive the Moufang data of M(U, τ)."""
    labels = [str(p) for p in points]
    P = len(labels)
    class_of = _class_array(classes, P)
    n_classes = len(classes)
    if n_classes <= 2:
        raise ConstructionError("classes", "need more than 2 classes")

    U = np.array(u_inf, dtype=np.int64).reshape(len(u_inf), -1)
    tau_arr = np.array(tau, dtype=np.int64)
    try:
        Perm(tau_arr)
    except ValueError:
        raise ConstructionError("tau", "tau is not a permutation") from None
    if tau_arr.shape != (P,) or U.shape[1] != P:
        raise ConstructionError("size", "permutation tables do not match the point count")
    for i, row in enumerate(U):
        if not np.array_equal(np.sort(row), np.arange(P)):
            raise ConstructionError("u_inf", "element is not a permutation", {"index": str(i)})
    if not is_group(U):
        raise ConstructionError("group", "u_inf is not closed under composition")
    bad = partition_violation(U, class_of)
    if bad is not None:
        raise ConstructionError("partition", "u_inf element breaks the partition", {"index": str(bad)})
    if partition_violation(tau_arr[None, :], class_of) is not None:
        raise ConstructionError("partition", "tau breaks the partition")

    fixed = np.flatnonzero(np.all(U == np.arange(P)[None, :], axis=0))
    if inf is None:
        ok = [p for p in fixed if class_of[tau_arr[p]] != class_of[p] and tau_arr[tau_arr[p]] == p]
        if not len(fixed):
            raise ConstructionError("C1", "U has no fixed point")
        inf = int(ok[0]) if ok else int(fixed[0])
    inf = int(inf)
    if inf not in set(int(p) for p in fixed):
        raise ConstructionError("C1", "the given infinity is not fixed by U", {"inf": labels[inf]})

    inf_cls = class_of[inf]
    outside = np.flatnonzero(class_of != inf_cls)
    stray = [int(p) for p in fixed if class_of[p] != inf_cls]
    if stray:
        raise ConstructionError("C1", "U fixes a point outside the class of infinity", {"x": labels[stray[0]]})
    base = int(outside[0])
    orbit = set(int(v) for v in U[:, base])
    if len(U) != len(outside) or orbit != set(int(v) for v in outside):
        raise ConstructionError(
            "C1", "U is not sharply transitive off the class of infinity", {"x": labels[base]}
        )

    induced = induced_on_classes(U, class_of)
    distinct = np.unique(induced, axis=0)
    others = set(range(n_classes)) - {int(inf_cls)}
    if not np.all(induced[:, inf_cls] == inf_cls):
        raise ConstructionError("C1'", "induced action moves the class of infinity")
    c_base = int(class_of[base])
    if len(distinct) != n_classes - 1 or set(int(v) for v in distinct[:, c_base]) != others:
        raise ConstructionError(
            "C1'", "induced action is not sharply transitive on the other classes", {"x": labels[base]}
        )

    zero = int(tau_arr[inf])
    if class_of[zero] == inf_cls:
        raise ConstructionError("C2", "infinity tau is equivalent to infinity", {"inf": labels[inf]})
    if tau_arr[zero] != inf:
        raise ConstructionError("C2", "infinity tau^2 differs from infinity", {"inf": labels[inf]})

    M = FinMoufang(labels, class_of, U, tau_arr, inf)
    logger.info("built %r (inf=%s, zero=%s)", M, labels[inf], labels[zero])
    return M


# Single operations.


def is_unit_point(M: FinMoufang, x: int) -> bool:
    by_class = M.is_unit(x)
    if M.not_inf[x]:
        induced = induced_on_classes(M.alpha[x][None, :], M.class_of)[0]
        by_alpha = bool(induced[M.class_of[M.zero]] != M.class_of[M.zero])
    else:
        by_alpha = False
    if by_class != by_alpha:
        raise InvariantViolation(f"unit characterizations disagree at {M.label(x)}")
    return by_class


def mu_map(M: FinMoufang, x: int) -> Perm:
    """μ_x = g α_x h with g ∈ U_0: ∞ ↦ −x and h ∈ U_0: x ↦ ∞."""
    if not M.is_unit(x):
        raise NotUnit(f"{M.label(x)} is not a unit")
    g = M.beta[M.neg[x]]
    hits = np.flatnonzero(M.u_zero[:, x] == M.inf)
    if len(hits) != 1:
        raise InvariantViolation(f"no unique h in U_0 with {M.label(x)} -> inf")
    h = M.u_zero[hits[0]]
    table = h[M.alpha[x][g]]
    if table[M.zero] != M.inf or table[M.inf] != M.zero:
        raise InvariantViolation(f"mu_{M.label(x)} does not swap 0 and inf")
    if not np.array_equal(table, M.mu[x]):
        raise InvariantViolation(f"mu_{M.label(x)} differs from the construction formula")
    return Perm(table, check=False)


def tilde_of(M: FinMoufang, x: int) -> int:
    if not M.is_unit(x):
        raise NotUnit(f"{M.label(x)} is not a unit")
    return int(M.tilde(x))


def scalar(M: FinMoufang, x: int, n: int, *, tilde: bool = False) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    if tilde and not M.not_zero[x]:
        raise SideViolation(f"{M.label(x)} is equivalent to 0")
    if not tilde and not M.not_inf[x]:
        raise SideViolation(f"{M.label(x)} is equivalent to infinity")
    return int(M.scalar_table(n, tilde=tilde)[x])


def division_hypothesis(M: FinMoufang, n: int) -> Optional[Dict[str, str]]:
    """First (u, k) with u a unit, k ≤ n and u·k not a unit; None when there is none."""
    for k in range(1, n + 1):
        table = M.scalar_table(k)
        bad = M.units[~M.unit_mask[table[M.units]]]
        if len(bad):
            u = int(bad[0])
            return {"u": M.label(u), "k": str(k), "u*k": M.label(table[u])}
    return None


def divide(M: FinMoufang, x: int, n: int) -> int:
    if not M.not_inf[x]:
        raise SideViolation(f"{M.label(x)} is equivalent to infinity")
    witness = division_hypothesis(M, n)
    if witness is not None:
        raise HypothesisFailed(f"some unit times k <= {n} is not a unit", witness)
    y = int(M.division_table(n)[x])
    if M.is_unit(x):
        constructive = int(M.mu[M.neg[x], M.neg[M.scalar_table(n)[x]]])
        if constructive != y:
            raise InvariantViolation(f"(-x*{n})mu_-x disagrees with search at {M.label(x)}")
    return y


def little_projective_group(M: FinMoufang, cap: int = DEFAULT_GROUP_CAP) -> GroupSummary:
    gens = np.concatenate([M.u_inf, M.u_zero])
    ident = np.arange(M.size).tobytes()
    keys, rows = set(), []
    for row in gens:
        k = row.tobytes()
        if k != ident and k not in keys:
            keys.add(k)
            rows.append(row)
    G = closure(np.array(rows).reshape(len(rows), M.size), cap)
    reached = set(zip(G[:, M.zero].tolist(), G[:, M.inf].tolist()))
    cls = M.class_of
    wanted = [(int(a), int(b)) for a in range(M.size) for b in range(M.size) if cls[a] != cls[b]]
    missing = [p for p in wanted if p not in reached]
    witness = {"x": M.label(missing[0][0]), "y": M.label(missing[0][1])} if missing else None
    logger.info("little projective group of order %d", len(G))
    return GroupSummary(
        order=int(len(G)),
        generators=len(rows),
        pair_transitive=not missing,
        pair_count=len(wanted),
        witness=witness,
    )


def check_special(M: FinMoufang) -> bool:
    U = M.units
    return bool(np.all(M.tau[M.neg[U]] == M.neg[M.tau[U]]))


def special_witness(M: FinMoufang) -> Optional[Dict[str, str]]:
    U = M.units
    bad = U[M.tau[M.neg[U]] != M.neg[M.tau[U]]]
    return {"x": M.label(bad[0])} if len(bad) else None


def abelian_witness(M: FinMoufang) -> Optional[Dict[str, str]]:
    U = M.u_inf
    for i, g in enumerate(U):
        gh = U[:, g]  # g then h
        hg = g[U]  # h then g
        diff = np.flatnonzero(np.any(gh != hg, axis=1))
        if len(diff):
            return {"g": M.label(g[M.zero]), "h": M.label(U[diff[0], M.zero])}
    return None


def check_abelian(M: FinMoufang) -> bool:
    return abelian_witness(M) is None


# Axiom verification.


def verify_moufang(M: FinMoufang, *, full_conjugation: bool = False, cap: int = DEFAULT_GROUP_CAP) -> VerifyReport:
    checks: List[Check] = []
    P = M.size
    U_inf_set = row_set(M.u_inf)
    U_zero_set = row_set(M.u_zero)
    units = M.units
    roots = [M.root_group(x) for x in range(P)]
    root_sets = [row_set(r) for r in roots]

    def first(pred) -> Optional[Dict[str, str]]:
        for x in units:
            if not pred(int(x)):
                return {"x": M.label(x)}
        return None

    w = first(lambda x: row_set(conj_rows(M.u_inf, M.gamma[M.tau_inv[x]])) == root_sets[x])
    checks.append(verdict("criterion.i_root_groups_agree", w is None, w))
    w = first(lambda x: row_set(conj_rows(M.u_zero, M.mu[x])) == U_inf_set)
    checks.append(verdict("criterion.ii_U0_mu_is_Uinf", w is None, w))
    w = first(lambda x: row_set(conj_rows(M.u_inf, M.mu[x])) == U_zero_set)
    checks.append(verdict("criterion.iii_Uinf_mu_is_U0", w is None, w))

    induced_sets = [row_set(induced_on_classes(r, M.class_of)) for r in roots]
    lm1 = None
    for x in range(P):
        for y in range(x + 1, P):
            if M.class_of[x] == M.class_of[y] and induced_sets[x] != induced_sets[y]:
                lm1 = {"x": M.label(x), "y": M.label(y)}
                break
        if lm1:
            break
    checks.append(verdict("lm1.induced_root_groups", lm1 is None, lm1))

    lm2 = lm2p = None
    for x in range(P):
        r = roots[x]
        off = np.flatnonzero(M.class_of != M.class_of[x])
        fixes = np.all(r[:, x] == x)
        sharp = len(r) == len(off) and set(r[:, off[0]].tolist()) == set(off.tolist())
        if lm2 is None and not (fixes and sharp):
            lm2 = {"x": M.label(x)}
        ind = np.unique(induced_on_classes(r, M.class_of), axis=0)
        cx = M.class_of[x]
        others = set(range(M.n_classes)) - {int(cx)}
        c0 = int(M.class_of[off[0]])
        ok = np.all(ind[:, cx] == cx) and len(ind) == M.n_classes - 1 and set(ind[:, c0].tolist()) == others
        if lm2p is None and not ok:
            lm2p = {"x": M.label(x)}
    checks.append(verdict("lm2.sharply_transitive", lm2 is None, lm2))
    checks.append(verdict("lm2p.induced_sharply_transitive", lm2p is None, lm2p))

    if full_conjugation:
        conjugators = closure(np.concatenate([M.u_inf, M.u_zero]), cap)
        note = "conjugation by every element of G"
    else:
        conjugators = np.concatenate([M.u_inf, M.u_zero])
        note = "conjugation by U_inf and U_0, which generate G"
    lm3 = None
    for x in range(P):
        for g in conjugators:
            if row_set(conj_rows(roots[x], g)) != root_sets[int(g[x])]:
                lm3 = {"x": M.label(x), "g_of_0": M.label(g[M.zero]), "g_of_inf": M.label(g[M.inf])}
                break
        if lm3:
            break
    checks.append(verdict("lm3.conjugation", lm3 is None, lm3, note))

    facts = {"points": P, "classes": M.n_classes, "units": int(len(units)), "root_group_order": int(len(M.u_inf))}
    logger.info("Moufang axioms checked for %r", M)
    return VerifyReport.assemble("moufang", checks, facts)


def verify_isomorphism(
    M: FinMoufang,
    N: FinMoufang,
    phi: np.ndarray,
    theta: np.ndarray,
    tau_m: np.ndarray,
    tau_n: np.ndarray,
) -> VerifyReport:
    """φ: X → X' with φ(x·u) = φ(x)·θ(u) for u in U_∞ and φ(x·τ) = φ(x)·τ'.

    `theta[i]` is the table in N attached to the row `M.u_inf[i]`.
    """
    phi = np.asarray(phi)
    theta = np.asarray(theta)
    checks: List[Check] = []
    bij = len(phi) == N.size and np.array_equal(np.sort(phi), np.arange(N.size))
    checks.append(verdict("iso.bijective", bool(bij)))

    def preserves(x, y):
        return (M.class_of[x] == M.class_of[y]) == (N.class_of[phi[x]] == N.class_of[phi[y]])

    def equivariant(i, x):
        return phi[M.u_inf[i][x]] == theta[i][phi[x]]

    def tau_equivariant(x):
        return np.asarray(phi[tau_m[x]] == tau_n[phi[x]])

    pts = domain("x", np.arange(M.size), M.label)
    checks.append(sweep("iso.preserves_equivalence", preserves, [pts, domain("y", np.arange(M.size), M.label)]))
    checks.append(
        sweep(
            "iso.root_group_equivariant",
            equivariant,
            [domain("u", np.arange(len(M.u_inf)), lambda i: M.label(M.u_inf[i][M.zero])), pts],
        )
    )
    checks.append(sweep("iso.tau_equivariant", tau_equivariant, [pts]))
    return VerifyReport.assemble("isomorphism", checks)
