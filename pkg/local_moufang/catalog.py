from __future__ import annotations

import itertools
import logging
from typing import Dict, List, Tuple

import numpy as np

from .jordan import JordanPair, make_pair_from_callback, make_pair_from_ring, module_from_ring
from .moufang import FinMoufang, build_from_U_tau
from .ring import DEFAULT_SIZE_CAP, FiniteLocalRing, ring_from_text

logger = logging.getLogger(__name__)

# Desk-scale instances exercised by the test-suite and the CLI examples.
CATALOG = ("zmod:5:1", "zmod:7:1", "zmod:4:1", "zmod:5:2", "poly:5:2")
# Z/4 is not uniquely 2-divisible, so extraction refuses it.
EXTRACTABLE = ("zmod:5:1", "zmod:7:1", "zmod:5:2", "poly:5:2")
CONTROLS = ("linear", "shifted")


def catalog_pair(text: str, *, size_cap: int = DEFAULT_SIZE_CAP) -> JordanPair:
    return make_pair_from_ring(ring_from_text(text, size_cap=size_cap))


def default_e(V: JordanPair) -> int:
    """The ring's 1 when V = (A,A), else the first invertible element of V⁺."""
    if V.ring is not None:
        return int(V.ring.one)
    units = np.flatnonzero(V.invertible(0))
    if not len(units):
        raise ValueError(f"{V!r} has no invertible element")
    return int(units[0])


def control_pair(R: FiniteLocalRing, kind: str) -> JordanPair:
    """Negative controls: pairs whose Q is not a Jordan quadratic operator.

    linear:  yQ_x = xy        (degree 1 in x)
    shifted: yQ_x = x(y+1)x   (affine, not linear, in y)
    """
    plus = module_from_ring(R, "V+")
    minus = module_from_ring(R, "V-")
    if kind == "linear":
        q = lambda _s, x, y: R.mul(x, y)  # noqa: E731
    elif kind == "shifted":
        q = lambda _s, x, y: R.mul(R.mul(x, R.add(y, R.one)), x)  # noqa: E731
    else:
        raise ValueError(f"unknown control {kind!r}; expected one of {', '.join(CONTROLS)}")
    pair = make_pair_from_callback(plus, minus, q, name=f"{R.spec}/{kind}", validate=False)
    pair.ring = R
    return pair


def swapped_tau_control(M: FinMoufang) -> FinMoufang:
    """M with τ replaced by the transposition of 0 and ∞."""
    tau = np.arange(M.size)
    tau[[M.zero, M.inf]] = [M.inf, M.zero]
    classes = [np.flatnonzero(M.class_of == c).tolist() for c in range(M.n_classes)]
    return build_from_U_tau(M.labels, classes, M.u_inf, tau, inf=M.inf)


def _s3() -> Tuple[List[Tuple[int, ...]], Dict[Tuple[int, ...], int]]:
    elements = list(itertools.permutations(range(3)))
    return elements, {g: i for i, g in enumerate(elements)}


def nonabelian_control() -> FinMoufang:
    """S3 acting regularly on six points by right multiplication, ∞ = 6, τ = (0 6).

    Every point is its own class, so C1 and C2 hold while U_∞ is nonabelian.
    """
    elements, index = _s3()
    rows = []
    for g in elements:
        row = [index[tuple(g[a[i]] for i in range(3))] for a in elements]
        rows.append(row + [6])
    tau = [6, 1, 2, 3, 4, 5, 0]
    labels = ["".join(map(str, g)) for g in elements] + ["inf"]
    return build_from_U_tau(labels, [[i] for i in range(7)], rows, tau, inf=6)
