from __future__ import annotations

import logging
from typing import List, Optional

import numpy as np

from .errors import ExtractionError
from .extraction import ExtractedPair, extract
from .jordan import JordanPair, verify_homomorphism
from .models import Check, VerifyReport
from .moufang import FinMoufang, verify_isomorphism
from .projective import AFFINE, build_moufang_from_pair
from .util import domain, failed, skipped, sweep, verdict

logger = logging.getLogger(__name__)

CHAINS = ("chain.plus_unit", "chain.plus_nonunit", "chain.minus_unit", "chain.minus_nonunit")


def _refused(exc: ExtractionError) -> List[Check]:
    if exc.report is not None:
        return exc.report.prefixed("extract")
    return [failed("extract", note=str(exc))]


def verify_roundtrip_pair(V: JordanPair, e: int, *, deep: bool = False) -> VerifyReport:
    """V → M(V) → W and the explicit isomorphism h: W → V."""
    checks: List[Check] = []
    plus, minus = V.modules
    for n in (2, 3):
        images = plus.times(plus.elements(), n)
        counts = np.bincount(images, minlength=plus.size)
        bad = np.flatnonzero(counts != 1)
        w = {"x": plus.label(bad[0])} if len(bad) else None
        checks.append(verdict(f"pre.uniquely_divisible_{n}", w is None, w))

    M = build_moufang_from_pair(V, e)
    space = M.space
    facts = {"e": plus.label(e), "points": M.size}
    try:
        ex = extract(M, deep=deep)
    except ExtractionError as exc:
        checks += _refused(exc)
        checks += [skipped(name, "extraction refused") for name in CHAINS]
        checks.append(skipped("iso", "extraction refused"))
        return VerifyReport.assemble("roundtrip-pair", checks, facts)
    checks += ex.report.prefixed("extract")

    frame = ex.frame
    W = ex.pair
    w_plus, w_minus = W.modules
    L0, L1 = frame.index

    forms = [space.points[int(p)] for p in frame.points[0]]
    if any(p.form != AFFINE for p in forms):
        checks.append(failed("h.plus_defined", note="a point of W+ is not affine"))
        return VerifyReport.assemble("roundtrip-pair", checks, facts)
    h_plus = np.array([p.value for p in forms], dtype=np.int64)

    offsets = space.offset_point(minus.elements())
    back = np.full(M.size, -1, dtype=np.int64)
    back[offsets] = minus.elements()
    h_minus = back[frame.points[1]]
    ok = bool(np.all(h_minus >= 0)) and len(np.unique(offsets)) == minus.size
    checks.append(verdict("h.minus_defined", ok))
    if not ok:
        return VerifyReport.assemble("roundtrip-pair", checks, facts)

    checks += verify_homomorphism(W, V, h_plus, h_minus).prefixed("iso")

    MU = M.mu
    inv = (V.invertible(0), V.invertible(1))
    two_e = int(plus.add(e, e))
    e_inv = space.e_inv
    twice_inv = int(minus.add(e_inv, e_inv))

    def plus_unit(x, y):
        return h_plus[L0[MU[x, offsets[y]]]] == V.q[0][x, y]

    def plus_nonunit(x, y):
        m = w_plus
        p = offsets[y]
        a = L0[MU[plus.add(e, x), p]]
        b = L0[MU[plus.add(two_e, x), p]]
        c = L0[MU[e, p]]
        val = m.add(m.sub(m.times(a, 2), b), m.times(c, 2))
        return h_plus[val] == V.q[0][x, y]

    def minus_unit(y, x):
        return h_minus[L1[MU[offsets[y], x]]] == V.q[1][y, x]

    def minus_nonunit(y, x):
        m = w_minus
        a = L1[MU[offsets[minus.add(e_inv, y)], x]]
        b = L1[MU[offsets[minus.add(twice_inv, y)], x]]
        c = L1[MU[offsets[e_inv], x]]
        val = m.add(m.sub(m.times(a, 2), b), m.times(c, 2))
        return h_minus[val] == V.q[1][y, x]

    xs = domain("x", plus.elements(), plus.label)
    ys = domain("y", minus.elements(), minus.label)
    checks.append(sweep(CHAINS[0], plus_unit, [domain("x", np.flatnonzero(inv[0]), plus.label), ys]))
    checks.append(sweep(CHAINS[1], plus_nonunit, [domain("x", np.flatnonzero(~inv[0]), plus.label), ys]))
    checks.append(sweep(CHAINS[2], minus_unit, [domain("y", np.flatnonzero(inv[1]), minus.label), xs]))
    checks.append(sweep(CHAINS[3], minus_nonunit, [domain("y", np.flatnonzero(~inv[1]), minus.label), xs]))
    logger.info("round trip V -> M(V) -> W checked for %r", V)
    return VerifyReport.assemble("roundtrip-pair", checks, facts)


def star_check(ex: ExtractedPair) -> Check:
    """Star condition: the action of U on ∞̄ is quasi-inverse translation."""
    frame = ex.frame
    M = frame.M
    m1 = frame.modules[1]
    B0, B1 = ex.mu_bilinear
    half = ex.halving[1]
    L1 = frame.index[1]
    pts0 = frame.points[0]
    inf_class = np.flatnonzero(~M.not_inf)

    def star(t, x):
        tl = L1[t]
        ta = L1[M.alpha[pts0[x], t]]
        lhs = m1.add(m1.sub(ta, B1[tl, ta, x]), half[half[B1[tl, tl, B0[x, x, ta]]]])
        rhs = m1.sub(tl, half[B1[tl, tl, x]])
        return lhs == rhs

    return sweep(
        "star",
        star,
        [domain("t", inf_class, M.label), domain("x", frame.modules[0].elements(), frame.modules[0].label)],
    )


def verify_star_and_iso(
    M: FinMoufang, tau: Optional[int] = None, e: Optional[int] = None, *, deep: bool = False
) -> VerifyReport:
    """The star condition and, when it holds, M ≅ M(W) for the extracted pair W."""
    checks: List[Check] = []
    try:
        ex = extract(M, tau, e, deep=deep)
    except ExtractionError as exc:
        checks += _refused(exc)
        checks += [skipped("star", "extraction refused"), skipped("iso", "extraction refused")]
        return VerifyReport.assemble("star-and-iso", checks)
    checks += ex.report.prefixed("extract")

    star = star_check(ex)
    checks.append(star)
    frame = ex.frame
    facts = {"e": M.label(frame.e)}
    if star.failed:
        checks.append(skipped("iso", "star condition fails; isomorphism inconclusive"))
        facts["conclusive"] = False
        return VerifyReport.assemble("star-and-iso", checks, facts)

    N = build_moufang_from_pair(ex.pair, frame.e_local[0])
    space = N.space
    L0, L1 = frame.index
    phi = np.where(M.not_inf, L0, -1)
    at_inf = np.flatnonzero(~M.not_inf)
    phi[at_inf] = space.offset_point(L1[at_inf])
    theta = N.alpha[phi[M.u_inf[:, M.zero]]]
    checks += verify_isomorphism(M, N, phi, theta, M.mu[frame.e], N.tau).prefixed("iso")
    facts["conclusive"] = True
    logger.info("star condition and isomorphism checked for %r", M)
    return VerifyReport.assemble("star-and-iso", checks, facts)
