from __future__ import annotations

import logging
from fractions import Fraction
from typing import List

import numpy as np

from .errors import NoSolution, NotUnique
from .models import Check, VerifyReport
from .moufang import FinMoufang, abelian_witness, division_hypothesis, special_witness
from .util import domain, skipped, sweep, verdict

logger = logging.getLogger(__name__)


def scale(M: FinMoufang, x, ell: Fraction, *, tilde: bool = False):
    """x·ℓ (or x·̃ℓ) for a positive rational ℓ whose denominator divides uniquely."""
    out = M.scalar_table(ell.numerator, tilde=tilde)[x]
    d = ell.denominator
    for p in (2, 3):
        while d % p == 0:
            out = M.division_table(p, tilde=tilde)[out]
            d //= p
    if d != 1:
        raise ValueError(f"unsupported denominator in {ell}")
    return out


def _fmt(ell: Fraction) -> str:
    return str(ell.numerator) if ell.denominator == 1 else f"{ell.numerator}/{ell.denominator}"


def verify_identity_suite(M: FinMoufang) -> VerifyReport:
    """Every identity of the μ-map, special, abelian and scalar theory, exhaustively."""
    AL, GA, MU, NEG, T, TI = M.alpha, M.gamma, M.mu, M.neg, M.tau, M.tau_inv
    unit = M.unit_mask
    U = domain("x", M.units, M.label)
    Y = domain("y", M.units, M.label)
    pts = domain("p", np.arange(M.size), M.label)
    not_inf = M.not_inf
    NI = np.flatnonzero(not_inf)
    NZ = np.flatnonzero(M.not_zero)
    tilde = M.tilde
    checks: List[Check] = []

    # μ-maps in any local Moufang set.

    checks.append(sweep("mu.inverse", lambda x, p: MU[NEG[x], MU[x, p]] == p, [U, pts]))
    checks.append(
        sweep("mu.conjugation", lambda x, p: MU[T[x], p] == T[MU[NEG[x], TI[p]]], [U, pts])
    )

    def hua(a, b, x, p):
        inv_h = MU[NEG[a], MU[NEG[b], p]]
        lhs = MU[b, MU[a, AL[x, inv_h]]]
        image = MU[b, MU[a, x]]
        return lhs == AL[image, p]

    checks.append(
        sweep(
            "mu.hua_conjugation",
            hua,
            [domain("tau", M.units, M.label), domain("mu", M.units, M.label), domain("x", NI, M.label), pts],
        )
    )

    def sum_formula(x, y, p):
        z = T[AL[NEG[TI[y]], TI[x]]]
        lhs = MU[NEG[x], MU[z, MU[y, p]]]
        rhs = MU[AL[NEG[x], y], p]
        return lhs == rhs, M.class_of[x] != M.class_of[y]

    def sum_representative(x, y):
        z = T[AL[NEG[TI[y]], TI[x]]]
        z2 = AL[tilde(y), MU[y, AL[NEG[y], x]]]
        z_tilde = AL[tilde(x), MU[x, AL[NEG[x], y]]]
        return (z == z2) & (tilde(z) == z_tilde), M.class_of[x] != M.class_of[y]

    checks.append(sweep("mu.sum_formula", sum_formula, [U, Y, pts]))
    checks.append(sweep("mu.sum_representative", sum_representative, [U, Y]))
    checks.append(
        sweep("mu.unit_preservation", lambda x, p: unit[MU[x, p]] == unit[p], [U, pts])
    )
    checks.append(
        sweep(
            "mu.alternative_form",
            lambda x, p: MU[x, p] == AL[NEG[tilde(x)], GA[NEG[TI[x]], AL[x, p]]],
            [U, pts],
        )
    )
    checks.append(
        sweep("mu.tilde_via_tau", lambda x: np.asarray(tilde(x) == T[NEG[TI[x]]]), [U])
    )

    def minus_form(x, p):
        m = NEG[x]
        q = AL[NEG[tilde(x)], p]
        q = AL[x, MU[m, q]]
        q = AL[tilde(m), MU[m, q]]
        return q == MU[m, p]

    checks.append(sweep("mu.minus_form", minus_form, [U, pts]))

    # Scalars without extra hypotheses.

    for n in (2, 3):
        sc, sct = M.scalar_table(n), M.scalar_table(n, tilde=True)
        checks.append(
            sweep(
                f"scalar.class_compatible[{n}]",
                lambda x, y, sc=sc: (M.class_of[sc[x]] == M.class_of[sc[y]], M.class_of[x] == M.class_of[y]),
                [domain("x", NI, M.label), domain("y", NI, M.label)],
            )
        )
        checks.append(
            sweep(
                f"scalar.tau_duality[{n}]",
                lambda x, sc=sc, sct=sct: np.asarray(T[sc[x]] == sct[T[x]]),
                [domain("x", NI, M.label)],
            )
        )
        checks.append(
            sweep(
                f"scalar.tau_duality_tilde[{n}]",
                lambda x, sc=sc, sct=sct: np.asarray(T[sct[x]] == sc[T[x]]),
                [domain("x", NZ, M.label)],
            )
        )

    sw = special_witness(M)
    special = sw is None
    checks.append(verdict("special", special, sw))
    aw = abelian_witness(M)
    abelian = aw is None
    checks.append(verdict("abelian", abelian, aw))

    if special:
        checks += _special_checks(M)
    else:
        checks += [skipped(name, "not special") for name in SPECIAL_CHECKS]
    if special and abelian:
        checks += _abelian_checks(M)
    else:
        checks += [skipped(name, "needs special with abelian root groups") for name in ABELIAN_CHECKS]

    for n in (2, 3):
        hyp = division_hypothesis(M, n)
        if not special or hyp is not None:
            reason = "not special" if not special else f"some unit times k <= {n} is not a unit"
            checks += [skipped(name, reason) for name in _division_names(n) + _scaling_names(n)]
            continue
        checks += _division_checks(M, n, abelian)
        if abelian:
            checks += _scaling_checks(M, n)
        else:
            checks += [skipped(name, "root groups are not abelian") for name in _scaling_names(n)]

    facts = {"special": special, "abelian": abelian, "units": int(len(M.units))}
    logger.info("identity suite finished for %r", M)
    return VerifyReport.assemble("moufang-identities", checks, facts)


SPECIAL_CHECKS = (
    "special.x_mu_x",
    "special.mu_alpha_conj[+]",
    "special.mu_alpha_conj[-]",
    "special.neg_commutes",
    "special.mu_form",
    "special.mu_minus_form",
    "special.sum",
)

ABELIAN_CHECKS = ("abelian.mu_involution", "abelian.mu_conjugate", "abelian.three_term")


def _special_checks(M: FinMoufang) -> List[Check]:
    AL, GA, MU, NEG, TI = M.alpha, M.gamma, M.mu, M.neg, M.tau_inv
    U = domain("x", M.units, M.label)
    Y = domain("y", M.units, M.label)
    pts = domain("p", np.arange(M.size), M.label)

    def conj_alpha(x, p, m):
        # α_x α_x^{μ_m} α_x, using μ_m^{-1} = μ_{-m}
        q = AL[x, p]
        q = MU[m, AL[x, MU[NEG[m], q]]]
        return AL[x, q]

    def minus_form(x, p):
        m = NEG[x]
        return AL[x, MU[m, AL[x, MU[m, AL[x, p]]]]] == MU[m, p]

    def sum_rule(x, y):
        s = AL[y, x]
        rhs = AL[NEG[y], AL[MU[y, x], AL[NEG[x], NEG[y]]]]
        return MU[s, x] == rhs, M.unit_mask[s]

    out = [
        sweep(SPECIAL_CHECKS[0], lambda x: (MU[x, x] == NEG[x]) & (MU[NEG[x], x] == NEG[x]), [U]),
        sweep(SPECIAL_CHECKS[1], lambda x, p: MU[x, p] == conj_alpha(x, p, x), [U, pts]),
        sweep(SPECIAL_CHECKS[2], lambda x, p: MU[x, p] == conj_alpha(x, p, NEG[x]), [U, pts]),
        sweep(SPECIAL_CHECKS[3], lambda x, y: MU[x, NEG[y]] == NEG[MU[x, y]], [U, Y]),
        sweep(SPECIAL_CHECKS[4], lambda x, p: MU[x, p] == AL[x, GA[NEG[TI[x]], AL[x, p]]], [U, pts]),
        sweep(SPECIAL_CHECKS[5], minus_form, [U, pts]),
        sweep(SPECIAL_CHECKS[6], sum_rule, [U, Y]),
    ]
    return out


def _abelian_checks(M: FinMoufang) -> List[Check]:
    AL, MU, NEG, T = M.alpha, M.mu, M.neg, M.tau
    U = domain("x", M.units, M.label)
    Y = domain("y", M.units, M.label)
    pts = domain("p", np.arange(M.size), M.label)

    def three_term(x, y, p):
        s = AL[y, x]
        a = MU[y, MU[s, MU[x, p]]]
        b = MU[x, MU[s, MU[y, p]]]
        c = MU[T[AL[T[y], T[x]]], p]
        return (a == b) & (b == c), M.unit_mask[s]

    return [
        sweep(ABELIAN_CHECKS[0], lambda x, p: MU[x, MU[x, p]] == p, [U, pts]),
        sweep(
            ABELIAN_CHECKS[1],
            lambda x, y, p: MU[y, MU[x, MU[NEG[y], p]]] == MU[MU[y, x], p],
            [U, Y, pts],
        ),
        sweep(ABELIAN_CHECKS[2], three_term, [U, Y, pts]),
    ]


def _division_names(n: int) -> List[str]:
    return [
        f"division.unique[{n}]",
        f"division.mu_identity[{n}]",
        f"division.tau_identity[{n}]",
        f"division.tau_fraction[{n}]",
        f"division.class_compatible[{n}]",
        f"division.global_unique[{n}]",
    ]


def _division_checks(M: FinMoufang, n: int, abelian: bool) -> List[Check]:
    """Unique n-th parts of units, built as (−x·n)μ_{−x}."""
    MU, NEG, T = M.mu, M.neg, M.tau
    U = domain("x", M.units, M.label)
    names = _division_names(n)
    NI = np.flatnonzero(M.not_inf)
    sc = M.scalar_table(n)
    counts = np.bincount(sc[NI], minlength=M.size)
    part = np.full(M.size, -1, dtype=np.int64)
    part[M.units] = MU[NEG[M.units], NEG[sc[M.units]]]

    out = [
        sweep(names[0], lambda x: np.asarray((sc[part[x]] == x) & (counts[x] == 1)), [U]),
        sweep(names[1], lambda x: np.asarray(sc[MU[NEG[x], sc[x]]] == NEG[x]), [U]),
        sweep(names[2], lambda x: np.asarray(sc[T[sc[x]]] == T[x]), [U]),
        sweep(
            names[3],
            lambda x: np.asarray((T[sc[x]] == part[T[x]]) & (T[part[x]] == sc[T[x]])),
            [U],
        ),
        sweep(
            names[4],
            lambda x, z: (M.class_of[part[x]] == M.class_of[part[z]], M.class_of[x] == M.class_of[z]),
            [U, domain("z", M.units, M.label)],
        ),
    ]
    if not abelian:
        out.append(skipped(names[5], "root groups are not abelian"))
        return out
    try:
        whole = M.division_table(n)
    except (NoSolution, NotUnique) as exc:
        out.append(verdict(names[5], False, note=str(exc)))
        return out
    out.append(
        sweep(
            names[5],
            lambda x: np.asarray((sc[whole[x]] == x) & (~M.unit_mask[x] | (whole[x] == part[x]))),
            [domain("x", NI, M.label)],
        )
    )
    return out


def _scaling_names(n: int) -> List[str]:
    names = []
    for ell in (Fraction(n), Fraction(1, n)):
        f = _fmt(ell)
        names += [f"scale.mu_plain[{f}]", f"scale.mu_tilde[{f}]", f"scale.tilde_is_inverse[{f}]"]
    return names


def _scaling_checks(M: FinMoufang, n: int) -> List[Check]:
    """yμ_{x·ℓ} = yμ_x·ℓ² and its tilde counterpart, for ℓ in {n, 1/n}."""
    MU = M.mu
    U = domain("x", M.units, M.label)
    NZ = domain("y", np.flatnonzero(M.not_zero), M.label)
    NI = domain("y", np.flatnonzero(M.not_inf), M.label)
    names = _scaling_names(n)
    try:
        for tilde in (False, True):
            M.division_table(n, tilde=tilde)
    except (NoSolution, NotUnique) as exc:
        return [verdict(name, False, note=str(exc)) for name in names]

    out = []
    for ell in (Fraction(n), Fraction(1, n)):

        def plain(x, y, ell=ell):
            return MU[scale(M, x, ell), y] == scale(M, MU[x, y], ell * ell)

        def tilde_side(x, y, ell=ell):
            a = MU[scale(M, x, ell, tilde=True), y]
            b = MU[scale(M, x, 1 / ell), y]
            c = scale(M, MU[x, y], ell * ell, tilde=True)
            return (a == b) & (b == c)

        def inverse(x, ell=ell):
            return np.asarray(scale(M, x, ell, tilde=True) == scale(M, x, 1 / ell))

        f = _fmt(ell)
        out.append(sweep(f"scale.mu_plain[{f}]", plain, [U, NZ]))
        out.append(sweep(f"scale.mu_tilde[{f}]", tilde_side, [U, NI]))
        out.append(sweep(f"scale.tilde_is_inverse[{f}]", inverse, [U]))
    return out
