from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotInvertible, NotQuadratic, NotQuasiInvertible, SideMismatch
from .models import SKIP, Check, JElem, Side, VerifyReport
from .ring import FiniteLocalRing
from .util import domain, inverse_rows, sweep, verdict

logger = logging.getLogger(__name__)

SIDES = (Side.PLUS, Side.MINUS)


@dataclass(frozen=True)
class Module:
    """A finite additive group given by its addition table."""

    name: str
    labels: Tuple[str, ...]
    add_table: np.ndarray
    neg_table: np.ndarray
    zero: int

    @property
    def size(self) -> int:
        return len(self.labels)

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def label(self, a: int) -> str:
        return self.labels[int(a)]

    def add(self, a, b):
        return self.add_table[a, b]

    def neg(self, a):
        return self.neg_table[a]

    def sub(self, a, b):
        return self.add_table[a, self.neg_table[b]]

    def times(self, a, n: int):
        """n·a by repeated addition (n ≥ 0)."""
        out = np.full(np.shape(a), self.zero, dtype=np.int64) if np.ndim(a) else self.zero
        for _ in range(n):
            out = self.add_table[out, a]
        return out

    def two_torsion(self) -> Optional[int]:
        els = self.elements()
        hits = els[(self.add_table[els, els] == self.zero) & (els != self.zero)]
        return int(hits[0]) if len(hits) else None


def module_from_ring(R: FiniteLocalRing, name: str) -> Module:
    els = R.elements()
    add = np.asarray(R.add(els[:, None], els[None, :]), dtype=np.int64)
    neg = np.asarray(R.neg(els), dtype=np.int64)
    labels = tuple(R.format(int(a)) for a in els)
    return Module(name=name, labels=labels, add_table=add, neg_table=neg, zero=R.zero)


QuadraticCallback = Callable[[Side, np.ndarray, np.ndarray], np.ndarray]


class JordanPair:
    """A pair of finite modules with the quadratic operators as dense tables.

    `q[s][x, y]` is yQ_x for x in V^s and y in V^-s. Everything derived from
    the tables (invertibility, quasi-inverses, the radical) is computed on
    first use and cached; the tables themselves are read-only.
    """

    def __init__(
        self,
        plus: Module,
        minus: Module,
        q_plus: np.ndarray,
        q_minus: np.ndarray,
        *,
        name: str = "",
        validate: bool = True,
    ) -> None:
        self.modules = (plus, minus)
        q_plus = np.array(q_plus, dtype=np.int64)
        q_minus = np.array(q_minus, dtype=np.int64)
        if q_plus.shape != (plus.size, minus.size) or q_minus.shape != (minus.size, plus.size):
            raise ValueError("Q tables do not match the module sizes")
        q_plus.setflags(write=False)
        q_minus.setflags(write=False)
        self.q = (q_plus, q_minus)
        self.name = name
        self.ring: Optional[FiniteLocalRing] = None
        self._cache: Dict[Tuple[str, int], np.ndarray] = {}
        self.prechecks: List[Check] = quadraticity_prechecks(self)
        bad = [c for c in self.prechecks if c.failed]
        if validate and bad:
            raise NotQuadratic(f"{bad[0].name} fails at {bad[0].witness}")

    @classmethod
    def from_callback(
        cls,
        plus: Module,
        minus: Module,
        q: QuadraticCallback,
        *,
        name: str = "",
        validate: bool = True,
    ) -> "JordanPair":
        tables = []
        for s, (dom, cod) in zip(SIDES, ((plus, minus), (minus, plus))):
            x = dom.elements()[:, None]
            y = cod.elements()[None, :]
            tables.append(np.broadcast_to(q(s, x, y), (dom.size, cod.size)))
        return cls(plus, minus, tables[0], tables[1], name=name, validate=validate)

    def __repr__(self) -> str:
        return f"JordanPair({self.name or '?'}, sizes={self.sizes})"

    @property
    def sizes(self) -> Tuple[int, int]:
        return (self.modules[0].size, self.modules[1].size)

    def module(self, side: Side) -> Module:
        return self.modules[side.index]

    def label(self, side: Side) -> Callable[[int], str]:
        return self.modules[side.index].label

    # Array-level operators. `s` is a side index (0 for +, 1 for -).

    def quad(self, s: int, x, y):
        return self.q[s][x, y]

    def bilinear(self, s: int, x, z, y):
        """yQ_{x,z} = yQ_{x+z} - yQ_x - yQ_z."""
        m = self.modules[s]
        q = self.q[s]
        return m.sub(m.sub(q[m.add(x, z), y], q[x, y]), q[z, y])

    def triple(self, s: int, x, y, z):
        """{x y z} = yQ_{x,z} for x, z in V^s."""
        return self.bilinear(s, x, z, y)

    def bergman(self, s: int, x, y, z):
        """zB_{x,y} = z - {x y z} + zQ_yQ_x."""
        m = self.modules[s]
        return m.add(m.sub(z, self.triple(s, x, y, z)), self.q[s][x, self.q[1 - s][y, z]])

    # Derived tables.

    def invertible(self, s: int) -> np.ndarray:
        key = ("inv_mask", s)
        if key not in self._cache:
            q = self.q[s]
            n = self.modules[1 - s].size
            if self.modules[s].size != n:
                mask = np.zeros(self.modules[s].size, dtype=bool)
            else:
                mask = np.all(np.sort(q, axis=1) == np.arange(n)[None, :], axis=1)
            self._cache[key] = mask
        return self._cache[key]

    def inverse_table(self, s: int) -> np.ndarray:
        """x ↦ x^{-1} (the unique w in V^-s with wQ_x = x), -1 where undefined."""
        key = ("inv", s)
        if key not in self._cache:
            mask = self.invertible(s)
            out = np.full(self.modules[s].size, -1, dtype=np.int64)
            rows = np.flatnonzero(mask)
            if len(rows):
                pre = inverse_rows(self.q[s][rows])
                out[rows] = pre[np.arange(len(rows)), rows]
            self._cache[key] = out
        return self._cache[key]

    def q_inverse_rows(self, s: int) -> np.ndarray:
        """Rows of Q_x^{-1} for invertible x (row of -1 otherwise)."""
        key = ("qinv_rows", s)
        if key not in self._cache:
            mask = self.invertible(s)
            out = np.full(self.q[s].shape[::-1], -1, dtype=np.int64)
            rows = np.flatnonzero(mask)
            if len(rows):
                out[rows] = inverse_rows(self.q[s][rows])
            self._cache[key] = out
        return self._cache[key]

    def _quasi_tables(self, s: int) -> Tuple[np.ndarray, np.ndarray]:
        key = ("qi", s)
        if key not in self._cache:
            m = self.modules[s]
            n_s, n_o = self.sizes[s], self.sizes[1 - s]
            qi = np.zeros((n_s, n_o), dtype=bool)
            qv = np.full((n_s, n_o), -1, dtype=np.int64)
            ys = np.arange(n_o)[:, None]
            zs = np.arange(n_s)[None, :]
            ident = np.arange(n_s)[None, :]
            for x in range(n_s):
                B = np.broadcast_to(self.bergman(s, x, ys, zs), (n_o, n_s))
                ok = np.all(np.sort(B, axis=1) == ident, axis=1)
                qi[x] = ok
                rows = np.flatnonzero(ok)
                if len(rows):
                    target = m.sub(x, self.q[s][x, rows])
                    pre = inverse_rows(B[rows])
                    qv[x, rows] = pre[np.arange(len(rows)), target]
            self._cache[key] = qi
            self._cache[("qv", s)] = qv
            logger.debug("quasi-inverse table for side %d of %r built", s, self)
        return self._cache[key], self._cache[("qv", s)]

    def qi_table(self, s: int) -> np.ndarray:
        return self._quasi_tables(s)[0]

    def quasi_inverse_table(self, s: int) -> np.ndarray:
        return self._quasi_tables(s)[1]

    def radical_mask(self, s: int) -> np.ndarray:
        return np.all(self.qi_table(s), axis=1)

    def radical_elements(self, s: int) -> np.ndarray:
        return np.flatnonzero(self.radical_mask(s))


def make_pair_from_callback(
    plus: Module, minus: Module, q: QuadraticCallback, *, name: str = "", validate: bool = True
) -> JordanPair:
    return JordanPair.from_callback(plus, minus, q, name=name, validate=validate)


def make_pair_from_ring(R: FiniteLocalRing, *, validate: bool = True) -> JordanPair:
    """The pair (A,A) with yQ_x = xyx."""
    plus = module_from_ring(R, "V+")
    minus = module_from_ring(R, "V-")
    pair = JordanPair.from_callback(
        plus, minus, lambda _s, x, y: R.mul(R.mul(x, y), x), name=str(R.spec), validate=validate
    )
    pair.ring = R
    return pair


# Element-level API.


def _check_side(a: JElem, side: Side, what: str) -> None:
    if a.side is not side:
        raise SideMismatch(f"{what} must lie in V{side.value}, got V{a.side.value}")


def q_apply(V: JordanPair, x: JElem, y: JElem) -> JElem:
    """yQ_x."""
    _check_side(y, -x.side, "y")
    return JElem(x.side, int(V.q[x.side.index][x.value, y.value]))


def q_bilinear(V: JordanPair, x: JElem, z: JElem, y: JElem) -> JElem:
    """yQ_{x,z}."""
    _check_side(z, x.side, "z")
    _check_side(y, -x.side, "y")
    return JElem(x.side, int(V.bilinear(x.side.index, x.value, z.value, y.value)))


def bergman_apply(V: JordanPair, x: JElem, y: JElem, z: JElem) -> JElem:
    """zB_{x,y}."""
    _check_side(y, -x.side, "y")
    _check_side(z, x.side, "z")
    return JElem(x.side, int(V.bergman(x.side.index, x.value, y.value, z.value)))


def is_invertible(V: JordanPair, v: JElem) -> bool:
    return bool(V.invertible(v.side.index)[v.value])


def jp_inverse(V: JordanPair, v: JElem) -> JElem:
    inv = int(V.inverse_table(v.side.index)[v.value])
    if inv < 0:
        raise NotInvertible(f"{V.module(v.side).label(v.value)} is not invertible")
    return JElem(-v.side, inv)


def is_quasi_invertible(V: JordanPair, x: JElem, y: JElem) -> bool:
    _check_side(y, -x.side, "y")
    return bool(V.qi_table(x.side.index)[x.value, y.value])


def quasi_inverse(V: JordanPair, x: JElem, y: JElem) -> JElem:
    """x^y = (x - yQ_x)B_{x,y}^{-1}."""
    _check_side(y, -x.side, "y")
    val = int(V.quasi_inverse_table(x.side.index)[x.value, y.value])
    if val < 0:
        raise NotQuasiInvertible(
            f"({V.module(x.side).label(x.value)}, {V.module(y.side).label(y.value)}) "
            "is not quasi-invertible"
        )
    return JElem(x.side, val)


def radical(V: JordanPair) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    return tuple(frozenset(int(a) for a in V.radical_elements(s)) for s in (0, 1))  # type: ignore[return-value]


def is_division(V: JordanPair) -> bool:
    for s in (0, 1):
        m = V.modules[s]
        nonzero = m.elements() != m.zero
        if not np.all(V.invertible(s)[nonzero]):
            return False
    return True


# Verification.


def _tag(name: str, s: int) -> str:
    return f"{name}[{SIDES[s].value}]"


def _doms(V: JordanPair, s: int, spec: Sequence[Tuple[str, int, Optional[np.ndarray]]]):
    """Domains from (name, relative side, optional subset) triples."""
    out = []
    for name, rel, subset in spec:
        side = s if rel == 0 else 1 - s
        m = V.modules[side]
        vals = m.elements() if subset is None else subset
        out.append(domain(name, vals, m.label))
    return out


def quadraticity_prechecks(V: JordanPair) -> List[Check]:
    checks = []
    for s in (0, 1):
        m, o = V.modules[s], V.modules[1 - s]
        q = V.q[s]

        def additive(x, y, y2, q=q, m=m, o=o):
            return q[x, o.add(y, y2)] == m.add(q[x, y], q[x, y2])

        def quad2(x, y, q=q, m=m):
            return q[m.times(x, 2), y] == m.times(q[x, y], 4)

        def quad3(x, y, q=q, m=m):
            return q[m.times(x, 3), y] == m.times(q[x, y], 9)

        def biadditive(x, x2, z, y, s=s, m=m):
            lhs = V.bilinear(s, m.add(x, x2), z, y)
            return lhs == m.add(V.bilinear(s, x, z, y), V.bilinear(s, x2, z, y))

        checks.append(sweep(_tag("q.additive", s), additive, _doms(V, s, [("x", 0, None), ("y", 1, None), ("y2", 1, None)])))
        checks.append(sweep(_tag("q.quadratic_2", s), quad2, _doms(V, s, [("x", 0, None), ("y", 1, None)])))
        checks.append(sweep(_tag("q.quadratic_3", s), quad3, _doms(V, s, [("x", 0, None), ("y", 1, None)])))
        checks.append(
            sweep(
                _tag("q.biadditive", s),
                biadditive,
                _doms(V, s, [("x", 0, None), ("x2", 0, None), ("z", 0, None), ("y", 1, None)]),
            )
        )
    return checks


def verify_jordan_axioms(V: JordanPair) -> VerifyReport:
    """JP1, JP2, JP3 and the linearized JP1/JP2 on both orientations."""
    checks: List[Check] = list(V.prechecks)
    torsion = {}
    for s in (0, 1):
        t, q, qo = V.triple, V.q[s], V.q[1 - s]

        def jp1(x, y, z, s=s, q=q):
            return t(s, x, y, q[x, z]) == q[x, t(1 - s, y, x, z)]

        def jp2(x, y, z, s=s, q=q, qo=qo):
            return t(s, q[x, y], y, z) == t(s, x, qo[y, x], z)

        def jp3(x, y, z, q=q, qo=qo):
            return q[q[x, y], z] == q[x, qo[y, q[x, z]]]

        def jp1_linear(x, v, z, y, w, s=s, m=V.modules[s]):
            b = V.bilinear
            lhs = m.add(
                m.add(t(s, x, y, b(s, v, z, w)), t(s, v, y, b(s, x, z, w))),
                t(s, z, y, b(s, x, v, w)),
            )
            rhs = m.add(
                m.add(b(s, v, z, t(1 - s, y, x, w)), b(s, x, z, t(1 - s, y, v, w))),
                b(s, x, v, t(1 - s, y, z, w)),
            )
            return lhs == rhs

        def jp2_linear(v, x, z, y, w, s=s, m=V.modules[s]):
            b = V.bilinear
            lhs = m.add(t(s, v, b(1 - s, y, w, x), z), t(s, x, b(1 - s, y, w, v), z))
            rhs = m.add(t(s, b(s, x, v, y), w, z), t(s, b(s, x, v, w), y, z))
            return lhs == rhs

        xyz_jp1 = _doms(V, s, [("x", 0, None), ("y", 1, None), ("z", 1, None)])
        xyz_jp2 = _doms(V, s, [("x", 0, None), ("y", 1, None), ("z", 0, None)])
        checks.append(sweep(_tag("jp1", s), jp1, xyz_jp1))
        checks.append(sweep(_tag("jp2", s), jp2, xyz_jp2))
        checks.append(sweep(_tag("jp3", s), jp3, xyz_jp1))
        checks.append(
            sweep(
                _tag("jp1.linearized", s),
                jp1_linear,
                _doms(V, s, [("x", 0, None), ("v", 0, None), ("z", 0, None), ("y", 1, None), ("w", 1, None)]),
            )
        )
        checks.append(
            sweep(
                _tag("jp2.linearized", s),
                jp2_linear,
                _doms(V, s, [("v", 0, None), ("x", 0, None), ("z", 0, None), ("y", 1, None), ("w", 1, None)]),
            )
        )
        tor = V.modules[s].two_torsion()
        torsion[SIDES[s].value] = tor is None
        name = _tag("no_2_torsion", s)
        if tor is None:
            checks.append(verdict(name, True))
        else:
            checks.append(
                Check(
                    name,
                    SKIP,
                    {"x": V.modules[s].label(tor)},
                    "2-torsion present; sufficiency criterion does not apply, JP3 checked directly",
                )
            )
    facts = {"sizes": list(V.sizes), "two_torsion_free": torsion}
    logger.info("Jordan axioms checked for %r", V)
    return VerifyReport.assemble(f"jordan-axioms {V.name}", checks, facts)


def verify_local(V: JordanPair) -> VerifyReport:
    checks: List[Check] = [] if not any(c.failed for c in V.prechecks) else list(V.prechecks)
    rad_sizes = []
    for s in (0, 1):
        m, o = V.modules[s], V.modules[1 - s]
        rad = V.radical_mask(s)
        noninv = ~V.invertible(s)
        diff = np.flatnonzero(rad != noninv)
        checks.append(
            verdict(
                _tag("local.radical_is_noninvertible", s),
                len(diff) == 0,
                {"x": m.label(diff[0])} if len(diff) else None,
            )
        )
        U = np.flatnonzero(noninv)
        rad_sizes.append(int(len(U)))

        def closed_sum(u, u2, m=m, noninv=noninv):
            return noninv[m.add(u, u2)]

        def q_u(u, v, s=s, noninv=noninv):
            return noninv[V.q[s][u, v]]

        def u_q(u, v, s=s):
            return ~V.invertible(1 - s)[V.q[1 - s][v, u]]

        def triple_in(u, v, v2, s=s, noninv=noninv):
            return noninv[V.triple(s, v2, v, u)]

        checks.append(sweep(_tag("local.ideal_sum", s), closed_sum, [domain("u", U, m.label), domain("u2", U, m.label)]))
        checks.append(sweep(_tag("local.ideal_vQu", s), q_u, [domain("u", U, m.label), domain("v", o.elements(), o.label)]))
        checks.append(sweep(_tag("local.ideal_uQv", s), u_q, [domain("u", U, m.label), domain("v", o.elements(), o.label)]))
        checks.append(
            sweep(
                _tag("local.ideal_triple", s),
                triple_in,
                [domain("u", U, m.label), domain("v", o.elements(), o.label), domain("v2", m.elements(), m.label)],
            )
        )
    proper = rad_sizes[0] < V.sizes[0] or rad_sizes[1] < V.sizes[1]
    checks.append(verdict("local.proper", proper))
    facts = {"radical_sizes": rad_sizes}
    return VerifyReport.assemble(f"local {V.name}", checks, facts)


def verify_basic_identities(V: JordanPair) -> VerifyReport:
    checks: List[Check] = []
    for s in (0, 1):
        m, o = V.modules[s], V.modules[1 - s]
        q, qo, t, b = V.q[s], V.q[1 - s], V.triple, V.bilinear
        inv_s, inv_o = V.inverse_table(s), V.inverse_table(1 - s)
        invertible_s = np.flatnonzero(V.invertible(s))
        invertible_o = np.flatnonzero(V.invertible(1 - s))
        qi_s, qv_s = V.qi_table(s), V.quasi_inverse_table(s)
        qi_o, qv_o = V.qi_table(1 - s), V.quasi_inverse_table(1 - s)
        rad_s, rad_o = V.radical_mask(s), V.radical_mask(1 - s)
        qinv_rows = V.q_inverse_rows(s)

        def jp4(x, y, w, s=s, q=q):
            a = b(s, x, q[x, y], w)
            bb = t(s, x, y, q[x, w])
            c = q[x, t(1 - s, y, x, w)]
            return (a == bb) & (bb == c)

        def bergman_inv(x, y, z, s=s, q=q, qo=qo):
            return V.bergman(s, x, y, z) == q[x, qo[o.sub(inv_s[x], y), z]]

        def bergman_second(y, x, z, s=s, q=q, qo=qo):
            return V.bergman(s, x, y, z) == q[m.sub(x, inv_o[y]), qo[y, z]]

        def bilinear_inverse(x, y, w, s=s):
            return qinv_rows[x, b(s, x, y, w)] == t(1 - s, inv_s[x], y, w)

        def shift(x, y, z):
            y_z = o.add(y, z)
            left = qi_s[x, y_z]
            first = qi_s[x, y]
            right = qi_s[qv_s[x, y], z]
            same_values = qv_s[x, y_z] == qv_s[qv_s[x, y], z]
            return (left == right) & (~left | same_values), first

        def symmetry(x, y, q=q):
            a = qi_s[x, y]
            same = a == qi_o[y, x]
            formula = qv_s[x, y] == m.add(x, q[x, qv_o[y, x]])
            return same & (~a | formula)

        def q_transfer(x, y, z, qo=qo):
            zq = qo[y, z]
            xq = qo[y, x]
            a = qi_s[x, zq]
            same = a == qi_o[xq, z]
            formula = qv_o[xq, z] == qo[y, qv_s[x, zq]]
            return same & (~a | formula)

        def absorb(x, y):
            return qi_s[x, y] & rad_s[qv_s[x, y]]

        def inverse_radical(x, y):
            in_rad = rad_s[m.sub(x, y)]
            return rad_o[o.sub(inv_s[x], inv_s[y])], in_rad

        X, Y, Z = ("x", 0, None), ("y", 1, None), ("z", 0, None)
        checks.append(sweep(_tag("jp4", s), jp4, _doms(V, s, [X, Y, ("w", 1, None)])))
        checks.append(sweep(_tag("bergman.inverse_form", s), bergman_inv, _doms(V, s, [("x", 0, invertible_s), Y, Z])))
        checks.append(sweep(_tag("bergman.second_form", s), bergman_second, _doms(V, s, [("y", 1, invertible_o), X, Z])))
        checks.append(
            sweep(
                _tag("q.bilinear_times_inverse", s),
                bilinear_inverse,
                _doms(V, s, [("x", 0, invertible_s), ("y", 0, None), ("w", 1, None)]),
            )
        )
        checks.append(sweep(_tag("quasi.shift", s), shift, _doms(V, s, [X, Y, ("z", 1, None)])))
        checks.append(sweep(_tag("quasi.symmetry", s), symmetry, _doms(V, s, [X, Y])))
        checks.append(sweep(_tag("quasi.q_transfer", s), q_transfer, _doms(V, s, [X, Y, Z])))
        checks.append(sweep(_tag("quasi.radical_absorption", s), absorb, _doms(V, s, [("x", 0, np.flatnonzero(rad_s)), Y])))
        checks.append(
            sweep(
                _tag("quasi.inverse_radical", s),
                inverse_radical,
                _doms(V, s, [("x", 0, invertible_s), ("y", 0, invertible_s)]),
            )
        )
    return VerifyReport.assemble(f"basic-identities {V.name}", checks)


def verify_homomorphism(
    V: JordanPair, W: JordanPair, h_plus: np.ndarray, h_minus: np.ndarray
) -> VerifyReport:
    """h = (h+, h-) from V to W: bijective, additive and Q-compatible."""
    hs = (np.asarray(h_plus), np.asarray(h_minus))
    checks: List[Check] = []
    for s in (0, 1):
        m, mw = V.modules[s], W.modules[s]
        h, ho = hs[s], hs[1 - s]
        bij = len(h) == mw.size and np.array_equal(np.sort(h), np.arange(mw.size))
        checks.append(verdict(_tag("hom.bijective", s), bool(bij)))

        def additive(a, c, h=h, m=m, mw=mw):
            return h[m.add(a, c)] == mw.add(h[a], h[c])

        def quadratic(x, y, s=s, h=h, ho=ho):
            return h[V.q[s][x, y]] == W.q[s][h[x], ho[y]]

        checks.append(sweep(_tag("hom.additive", s), additive, _doms(V, s, [("a", 0, None), ("c", 0, None)])))
        checks.append(sweep(_tag("hom.quadratic", s), quadratic, _doms(V, s, [("x", 0, None), ("y", 1, None)])))
    return VerifyReport.assemble(f"homomorphism {V.name} -> {W.name}", checks)
