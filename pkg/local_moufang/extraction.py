from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import ExtractionError, NotUnit, SideViolation
from .jordan import JordanPair, Module, verify_jordan_axioms, verify_local
from .models import Check, ProjPoint, VerifyReport
from .moufang import FinMoufang, abelian_witness, special_witness
from .util import domain, failed, skipped, sweep, verdict

logger = logging.getLogger(__name__)

SIDE_TAGS = ("+", "-")
CASCADE_DEPTH = 8
J4_CHECKS = ("j4.symmetric", "j4.biadditive", "j4.hom", "j4.cascade_agreement")


def _tag(name: str, s: int) -> str:
    return f"{name}[{SIDE_TAGS[s]}]"


class ExtractionFrame:
    """The two extracted modules of M as local index spaces.

    Side 0 is V⁺ = X∖∞̄ with x+z = 0α_xα_z, side 1 is V⁻ = X∖0̄ with
    y+̃w = ∞γ_{yτ}γ_{wτ}. `mu[s][t, a]` is the image of a ∈ V^{-s} under μ_t for
    a unit t on side s (rows of non-units are -1).
    """

    def __init__(self, M: FinMoufang, e: int, tau: np.ndarray) -> None:
        self.M = M
        self.e = int(e)
        self.tau = np.asarray(tau)
        P = M.size
        self.points = (np.flatnonzero(M.not_inf), np.flatnonzero(M.not_zero))
        index = []
        for pts in self.points:
            idx = np.full(P, -1, dtype=np.int64)
            idx[pts] = np.arange(len(pts))
            index.append(idx)
        self.index = tuple(index)
        self.units = tuple(M.unit_mask[pts] for pts in self.points)
        self.conv = tuple(self.index[1 - s][self.points[s]] for s in (0, 1))
        self.tau_map = tuple(self.index[1 - s][self.tau[self.points[s]]] for s in (0, 1))
        self.e_local = (int(self.index[0][self.e]), int(self.index[1][self.e]))
        self.modules = (self._plus_module(), self._minus_module())
        self.mu = tuple(self._mu_rows(s) for s in (0, 1))

    def _module(self, s: int, add: np.ndarray, zero: int) -> Module:
        pts = self.points[s]
        neg = np.argmax(add == self.index[s][zero], axis=1).astype(np.int64)
        labels = tuple(self.M.label(p) for p in pts)
        return Module(
            name=f"V{SIDE_TAGS[s]}",
            labels=labels,
            add_table=add,
            neg_table=neg,
            zero=int(self.index[s][zero]),
        )

    def _plus_module(self) -> Module:
        pts = self.points[0]
        # x + z = xα_z
        add = self.index[0][self.M.alpha[pts[None, :], pts[:, None]]]
        return self._module(0, add, self.M.zero)

    def _minus_module(self) -> Module:
        M, pts = self.M, self.points[1]
        tinv = np.argsort(self.tau)
        # γ'_{yτ} = α_{yτ}^τ, stored per y ∈ V⁻
        rows = M.alpha[self.tau[pts]]
        gamma = self.tau[rows[:, tinv]]
        first = gamma[:, M.inf]
        add = self.index[1][gamma[np.arange(len(pts))[None, :], first[:, None]]]
        return self._module(1, add, M.inf)

    def _mu_rows(self, s: int) -> np.ndarray:
        pts, other = self.points[s], self.points[1 - s]
        out = np.full((len(pts), len(other)), -1, dtype=np.int64)
        rows = np.flatnonzero(self.units[s])
        if len(rows):
            img = self.M.mu[pts[rows][:, None], other[None, :]]
            out[rows] = self.index[s][img]
        return out

    def label(self, s: int):
        return self.modules[s].label


class _Cascade:
    """μ_{x,z} (side 0) or μ̃_{y,w} (side 1) by the linearity cascade, memoised per pair."""

    def __init__(self, frame: ExtractionFrame, s: int) -> None:
        self.m = frame.modules[s]
        self.units = frame.units[s]
        self.mu = frame.mu[s]
        self.e = frame.e_local[s]
        self.memo: Dict[Tuple[int, int], np.ndarray] = {}

    def __call__(self, x: int, z: int, depth: int = 0) -> np.ndarray:
        key = (x, z)
        if key in self.memo:
            return self.memo[key]
        if depth > CASCADE_DEPTH:
            raise ExtractionError(
                f"cascade for ({self.m.label(x)}, {self.m.label(z)}) does not terminate"
            )
        m, u, d = self.m, self.units, depth + 1
        xz = int(m.add(x, z))
        if u[x] and u[z] and u[xz]:
            row = m.sub(m.sub(self.mu[xz], self.mu[x]), self.mu[z])
        elif u[x] and u[z]:
            row = m.neg(self(int(m.neg(x)), z, d))
        elif u[x]:
            row = m.sub(self(x, xz, d), self(x, x, d))
        elif u[z]:
            row = self(z, x, d)
        else:
            row = m.sub(self(int(m.add(x, self.e)), z, d), self(self.e, z, d))
        self.memo[key] = row
        return row

    def table(self) -> np.ndarray:
        n = self.m.size
        return np.array([[self(x, z) for z in range(n)] for x in range(n)], dtype=np.int64)


def default_e(M: FinMoufang, e: Optional[int] = None) -> int:
    """The anchoring unit: the given one, [e,0] for M(V), else the first unit."""
    if e is not None:
        if not M.is_unit(e):
            raise NotUnit(f"{M.label(e)} is not a unit")
        return int(e)
    if M.space is not None:
        return int(M.space.index[ProjPoint("A", M.space.e)])
    if not len(M.units):
        raise ExtractionError("the Moufang set has no units")
    return int(M.units[0])


def _tau_table(M: FinMoufang, tau: Optional[int]) -> np.ndarray:
    if tau is None:
        return M.tau
    if not M.is_unit(tau):
        raise NotUnit(f"{M.label(tau)} is not a unit")
    return M.mu[tau]


# Preconditions.


def _module_checks(frame: ExtractionFrame) -> List[Check]:
    checks = []
    for s in (0, 1):
        m, o = frame.modules[s], frame.modules[1 - s]
        els = domain("a", m.elements(), m.label)
        b = domain("b", m.elements(), m.label)
        c = domain("c", m.elements(), m.label)
        checks.append(
            sweep(
                _tag("modules.associative", s),
                lambda a, b, c, m=m: m.add(m.add(a, b), c) == m.add(a, m.add(b, c)),
                [els, b, c],
            )
        )
        checks.append(
            sweep(_tag("modules.commutative", s), lambda a, b, m=m: m.add(a, b) == m.add(b, a), [els, b])
        )
        checks.append(
            sweep(
                _tag("modules.inverses", s),
                lambda a, m=m: np.asarray((m.add(a, m.neg(a)) == m.zero) & (m.add(a, m.zero) == a)),
                [els],
            )
        )
        # μ_t for t a unit on the other side is additive on this side
        mu_o = frame.mu[1 - s]
        checks.append(
            sweep(
                _tag("mu.additive", s),
                lambda t, a, b, m=m, o=o, mu_o=mu_o: mu_o[t, m.add(a, b)] == o.add(mu_o[t, a], mu_o[t, b]),
                [
                    domain("t", np.flatnonzero(frame.units[1 - s]), o.label),
                    domain("a", m.elements(), m.label),
                    domain("b", m.elements(), m.label),
                ],
            )
        )
    return checks


def _j4_checks(frame: ExtractionFrame, tables: Tuple[np.ndarray, np.ndarray]) -> List[Check]:
    checks = []
    for s in (0, 1):
        m, o, B = frame.modules[s], frame.modules[1 - s], tables[s]
        mu, units, e = frame.mu[s], frame.units[s], frame.e_local[s]
        x = domain("x", m.elements(), m.label)
        x2 = domain("x2", m.elements(), m.label)
        z = domain("z", m.elements(), m.label)
        y = domain("y", o.elements(), o.label)
        w = domain("w", o.elements(), o.label)

        def biadditive(x, x2, z, y, B=B, m=m):
            return B[m.add(x, x2), z, y] == m.add(B[x, z, y], B[x2, z, y])

        def hom(x, z, y, w, B=B, m=m, o=o):
            return B[x, z, o.add(y, w)] == m.add(B[x, z, y], B[x, z, w])

        def agreement(x, z, y, B=B, m=m, mu=mu, units=units, e=e):
            xz = m.add(x, z)
            ok = B[x, z, y] == B[z, x, y]
            ok &= B[x, z, y] == m.neg(B[m.neg(x), z, y])
            ok &= B[x, z, y] == m.sub(B[x, xz, y], B[x, x, y])
            ok &= B[x, z, y] == m.sub(B[m.add(x, e), z, y], B[e, z, y])
            direct = m.sub(m.sub(mu[xz, y], mu[x, y]), mu[z, y])
            all_units = units[x] & units[z] & units[xz]
            return ok & (~all_units | (B[x, z, y] == direct))

        checks.append(sweep(_tag("j4.symmetric", s), lambda x, z, y, B=B: B[x, z, y] == B[z, x, y], [x, z, y]))
        checks.append(sweep(_tag("j4.biadditive", s), biadditive, [x, x2, z, y]))
        checks.append(sweep(_tag("j4.hom", s), hom, [x, z, y, w]))
        checks.append(sweep(_tag("j4.cascade_agreement", s), agreement, [x, z, y]))
    return checks


def _preconditions(
    M: FinMoufang, e: int, tau: np.ndarray
) -> Tuple[VerifyReport, ExtractionFrame, Optional[Tuple[np.ndarray, np.ndarray]]]:
    checks: List[Check] = []
    sw = special_witness(M)
    checks.append(verdict("j1.special", sw is None, sw))
    aw = abelian_witness(M)
    checks.append(verdict("j2.abelian", aw is None, aw))
    for n in (2, 3):
        table = M.scalar_table(n)
        bad = M.units[~M.unit_mask[table[M.units]]]
        w = {"x": M.label(bad[0]), f"x*{n}": M.label(table[bad[0]])} if len(bad) else None
        checks.append(verdict(f"j3.units_times_{n}", w is None, w))

    frame = ExtractionFrame(M, e, tau)
    checks += _module_checks(frame)
    tables = None
    names = [_tag(n, s) for s in (0, 1) for n in J4_CHECKS]
    if any(c.failed for c in checks):
        checks += [skipped(n, "needs J1-J3 and abelian module laws") for n in names]
    else:
        try:
            tables = (_Cascade(frame, 0).table(), _Cascade(frame, 1).table())
        except ExtractionError as exc:
            checks += [failed(n, note=str(exc)) for n in names]
        else:
            checks += _j4_checks(frame, tables)
    facts = {
        "e": M.label(e),
        "sizes": [frame.modules[0].size, frame.modules[1].size],
    }
    report = VerifyReport.assemble("extraction-preconditions", checks, facts)
    if not report.passed:
        tables = None
    logger.info("extraction preconditions for %r: %s", M, "pass" if report.passed else "fail")
    return report, frame, tables


def check_preconditions(
    M: FinMoufang, *, e: Optional[int] = None, tau: Optional[int] = None
) -> VerifyReport:
    """J1-J3 exhaustively, J4 by building the cascade and testing it."""
    e = default_e(M, e)
    return _preconditions(M, e, _tau_table(M, tau))[0]


def mu_bilinear(
    M: FinMoufang,
    x: int,
    z: int,
    *,
    e: Optional[int] = None,
    tau: Optional[int] = None,
    tilde: bool = False,
) -> np.ndarray:
    """Point table of μ_{x,z}: V⁻ → V⁺ (or μ̃_{x,z}: V⁺ → V⁻), -1 off the domain."""
    e = default_e(M, e)
    frame = ExtractionFrame(M, e, _tau_table(M, tau))
    s = 1 if tilde else 0
    ix, iz = frame.index[s][x], frame.index[s][z]
    if ix < 0 or iz < 0:
        where = "0" if tilde else "infinity"
        raise SideViolation(f"arguments must not be equivalent to {where}")
    row = _Cascade(frame, s)(int(ix), int(iz))
    out = np.full(M.size, -1, dtype=np.int64)
    out[frame.points[1 - s]] = frame.points[s][row]
    return out


# Extraction.


@dataclass(frozen=True)
class ExtractedPair:
    frame: ExtractionFrame
    pair: JordanPair
    mu_bilinear: Tuple[np.ndarray, np.ndarray]
    halving: Tuple[np.ndarray, np.ndarray]
    report: Optional[VerifyReport] = None

    @property
    def moufang(self) -> FinMoufang:
        return self.frame.M

    @property
    def modules(self) -> Tuple[Module, Module]:
        return self.frame.modules

    def to_local(self, s: int, point: int) -> int:
        i = int(self.frame.index[s][point])
        if i < 0:
            raise SideViolation(f"{self.moufang.label(point)} is not in V{SIDE_TAGS[s]}")
        return i

    def to_point(self, s: int, local) -> Any:
        return self.frame.points[s][local]


def _halving(m: Module) -> np.ndarray:
    els = m.elements()
    doubled = m.add_table[els, els]
    counts = np.bincount(doubled, minlength=m.size)
    bad = np.flatnonzero(counts != 1)
    if len(bad):
        a = int(bad[0])
        raise ExtractionError(f"{m.label(a)} has {int(counts[a])} halves in {m.name}")
    out = np.empty(m.size, dtype=np.int64)
    out[doubled] = els
    return out


def extract(
    M: FinMoufang,
    tau: Optional[int] = None,
    e: Optional[int] = None,
    *,
    deep: bool = False,
) -> ExtractedPair:
    """The local Jordan pair with Q_x = μ_{x,x}·½ and its embedded verification."""
    e = default_e(M, e)
    pre, frame, tables = _preconditions(M, e, _tau_table(M, tau))
    if tables is None:
        first = pre.failures()[0]
        raise ExtractionError(f"not Jordan-extractable: {first.name} fails", pre)

    halves = (_halving(frame.modules[0]), _halving(frame.modules[1]))
    q = []
    for s in (0, 1):
        n = frame.modules[s].size
        diag = tables[s][np.arange(n), np.arange(n)]
        q.append(halves[s][diag])
    W = JordanPair(frame.modules[0], frame.modules[1], q[0], q[1], name="extracted", validate=False)
    ex = ExtractedPair(frame=frame, pair=W, mu_bilinear=tables, halving=halves)

    checks: List[Check] = pre.prefixed("pre")
    checks += verify_jordan_axioms(W).prefixed("jordan")
    checks += verify_local(W).prefixed("local")
    checks += verify_extraction_identities(ex, deep=deep).prefixed("identities")
    for s in (0, 1):
        expected = frozenset(np.flatnonzero(~frame.units[s]).tolist())
        got = frozenset(W.radical_elements(s).tolist())
        w = None
        if expected != got:
            diff = sorted(expected ^ got)[0]
            w = {"x": frame.modules[s].label(diff)}
        checks.append(verdict(_tag("rad.matches_classes", s), expected == got, w))
        units = np.flatnonzero(frame.units[s])
        checks.append(
            sweep(
                _tag("q.unit_is_mu", s),
                lambda t, y, s=s: W.q[s][t, y] == frame.mu[s][t, y],
                [
                    domain("t", units, frame.modules[s].label),
                    domain("y", frame.modules[1 - s].elements(), frame.modules[1 - s].label),
                ],
            )
        )
    facts = dict(pre.facts)
    facts["tau"] = "input" if tau is None else M.label(tau)
    facts["radical_sizes"] = [int((~frame.units[s]).sum()) for s in (0, 1)]
    report = VerifyReport.assemble("extraction", checks, facts)
    logger.info("extracted %r from %r", W, M)
    return replace(ex, report=report)


# The identity suite of the extracted structure.


def verify_extraction_identities(ex: ExtractedPair, *, deep: bool = False) -> VerifyReport:
    frame = ex.frame
    checks: List[Check] = []
    for s in (0, 1):
        o = 1 - s
        ms, mo = frame.modules[s], frame.modules[o]
        Bs, Bo = ex.mu_bilinear[s], ex.mu_bilinear[o]
        MLs, MLo = frame.mu[s], frame.mu[o]
        conv = frame.conv[s]
        tau_s, tau_o = frame.tau_map[s], frame.tau_map[o]
        Us = np.flatnonzero(frame.units[s])
        Uo = np.flatnonzero(frame.units[o])

        def dom(name, vals, side):
            return domain(name, vals, frame.modules[side].label)

        def t_mu_t_x(t, x, Bs=Bs, ms=ms, conv=conv):
            return Bs[t, x, conv[t]] == ms.neg(ms.times(x, 2))

        def mu_tt(t, y, Bs=Bs, ms=ms, MLs=MLs):
            return Bs[t, t, y] == ms.times(MLs[t, y], 2)

        def reverse_order(a, b, x, Bs=Bs, Bo=Bo, MLo=MLo, conv=conv):
            ca, cb = conv[a], conv[b]
            left = MLo[cb, Bs[a, b, MLo[ca, x]]]
            right = MLo[ca, Bs[a, b, MLo[cb, x]]]
            return (left == right) & (right == Bo[ca, cb, x])

        def s_mu_t_mu_st(a, b, Bs=Bs, ms=ms, MLs=MLs, MLo=MLo, conv=conv):
            return Bs[a, b, MLo[conv[b], a]] == ms.neg(ms.times(MLs[a, conv[b]], 2))

        def tau_transfer(x, z, y, Bs=Bs, Bo=Bo, tau_s=tau_s, tau_o=tau_o):
            return tau_s[Bs[x, z, y]] == Bo[tau_s[x], tau_s[z], tau_o[y]]

        def jp1_units(x, z, y, Bs=Bs, Bo=Bo, MLo=MLo):
            a = Bo[MLo[y, z], y, x]
            b = MLo[y, Bs[x, z, y]]
            c = Bo[MLo[y, x], y, z]
            return (a == b) & (b == c)

        def jp2_units(x, z, y, Bs=Bs, MLs=MLs, MLo=MLo):
            return Bs[x, z, MLo[y, x]] == Bs[MLs[x, y], z, y]

        checks.append(sweep(_tag("ext.t_mu_t_x", s), t_mu_t_x, [dom("t", Us, s), dom("x", ms.elements(), s)]))
        checks.append(sweep(_tag("ext.mu_tt", s), mu_tt, [dom("t", Us, s), dom("y", mo.elements(), o)]))
        checks.append(
            sweep(_tag("ext.reverse_order", s), reverse_order, [dom("s", Us, s), dom("t", Us, s), dom("x", ms.elements(), s)])
        )
        checks.append(sweep(_tag("ext.s_mu_t_mu_st", s), s_mu_t_mu_st, [dom("s", Us, s), dom("t", Us, s)]))
        checks.append(
            sweep(
                _tag("ext.tau_transfer", s),
                tau_transfer,
                [dom("x", ms.elements(), s), dom("z", ms.elements(), s), dom("y", mo.elements(), o)],
            )
        )
        checks.append(sweep(_tag("ext.jp1_units", s), jp1_units, [dom("x", Us, s), dom("z", Us, s), dom("y", Uo, o)]))
        checks.append(sweep(_tag("ext.jp2_units", s), jp2_units, [dom("x", Us, s), dom("z", Us, s), dom("y", Uo, o)]))

    if deep:
        checks += _anchored_checks(ex)
    else:
        checks += [skipped(name, "deep mode off") for name in ANCHORED_CHECKS]
    return VerifyReport.assemble("extraction-identities", checks)


ANCHORED_CHECKS = (
    "qj.basic_mu_xe",
    "qj.basic_xmue_mu_xe",
    "qj.linearized_shift",
    "qj.linearized_reverse",
    "qj.mu_xe_square",
    "qj.e_mu_z_emux",
    "qj.e_mu_v_emuxz",
    "qj.symmetric_shift",
)


def _anchored_checks(ex: ExtractedPair) -> List[Check]:
    """Identities anchored at the fixed unit e, over all units of V⁺."""
    frame = ex.frame
    m0 = frame.modules[0]
    B0, B1 = ex.mu_bilinear
    ML0, ML1 = frame.mu
    conv = frame.conv[0]
    e0, ce = frame.e_local
    U0 = np.flatnonzero(frame.units[0])
    U1 = np.flatnonzero(frame.units[1])

    def dom(name, vals, side=0):
        return domain(name, vals, frame.modules[side].label)

    def basic_mu_xe(x, y):
        a = B0[x, e0, y]
        b = ML0[e0, B1[y, ML1[ce, x], e0]]
        c = m0.neg(B0[ML0[e0, y], x, ce])
        return (a == b) & (b == c)

    def linearized_shift(r, s, t):
        cs = conv[s]
        lhs = m0.add(B0[t, s, ML1[cs, r]], B0[r, s, ML1[cs, t]])
        return lhs == m0.neg(m0.times(B0[r, t, cs], 2))

    def linearized_reverse(r, s, t):
        return B0[t, s, ML1[conv[s], r]] == ML0[r, B1[conv[r], conv[s], t]]

    def mu_xe_square(x, y):
        lhs = m0.add(B0[x, e0, ML1[ce, B0[x, e0, y]]], B0[ML0[x, ce], e0, y])
        return lhs == m0.times(ML0[x, y], 2)

    def e_mu_v_emuxz(x, z, v):
        lhs = B0[v, B0[x, z, ce], ce]
        return lhs == m0.add(B0[v, z, ML1[ce, x]], B0[v, x, ML1[ce, z]])

    x, y = dom("x", U0), dom("y", U1, 1)
    z, v = dom("z", U0), dom("v", U0)
    return [
        sweep(ANCHORED_CHECKS[0], basic_mu_xe, [x, y]),
        sweep(
            ANCHORED_CHECKS[1],
            lambda x: np.asarray(B0[x, e0, ML1[ce, x]] == m0.neg(m0.times(ML0[x, ce], 2))),
            [x],
        ),
        sweep(ANCHORED_CHECKS[2], linearized_shift, [dom("r", U0), dom("s", U0), dom("t", U0)]),
        sweep(ANCHORED_CHECKS[3], linearized_reverse, [dom("r", U0), dom("s", U0), dom("t", U0)]),
        sweep(ANCHORED_CHECKS[4], mu_xe_square, [x, dom("y", frame.modules[1].elements(), 1)]),
        sweep(ANCHORED_CHECKS[5], lambda z, x: B0[z, ML0[x, ce], ce] == B0[z, x, ML1[ce, x]], [z, x]),
        sweep(ANCHORED_CHECKS[6], e_mu_v_emuxz, [x, z, v]),
        sweep(
            ANCHORED_CHECKS[7],
            lambda x, z: B0[ML0[x, ML1[ce, z]], z, ce] == B0[ML0[z, ML1[ce, x]], x, ce],
            [x, z],
        ),
    ]


def export_tables(ex: ExtractedPair) -> Dict[str, Any]:
    """Addition, negation and Q tables of both extracted modules, by point label."""
    out: Dict[str, Any] = {"e": ex.moufang.label(ex.frame.e)}
    for s, key in ((0, "plus"), (1, "minus")):
        m = ex.modules[s]
        out[key] = {
            "labels": list(m.labels),
            "zero": m.label(m.zero),
            "add": m.add_table.tolist(),
            "neg": m.neg_table.tolist(),
            "q": ex.pair.q[s].tolist(),
        }
    return out
