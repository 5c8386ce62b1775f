from __future__ import annotations

import logging
import re
from typing import List

import numpy as np
import sympy

from .errors import NonUnit, RingSpecError
from .models import RingSpec, VerifyReport
from .util import domain, sweep, verdict

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 3125

_SPEC_RE = re.compile(r"^\s*(zmod|poly):(\d+):(\d+)\s*$")
_TERM_RE = re.compile(r"^(\d*)(t(?:\^(\d+))?)?$")


def parse_ring_spec(text: str) -> RingSpec:
    """Parse `kind:p:k`; a prime-power modulus `zmod:q^j:k` names Z/q^(jk)."""
    m = _SPEC_RE.match(text or "")
    if not m:
        raise RingSpecError(f"bad ring spec {text!r}; expected zmod:p:k or poly:p:k")
    kind, p, k = m.group(1), int(m.group(2)), int(m.group(3))
    if kind == "zmod" and p > 1 and not sympy.isprime(p):
        factors = sympy.factorint(p)
        if len(factors) == 1:
            ((q, j),) = factors.items()
            p, k = int(q), int(j) * k
    return RingSpec(kind=kind, p=p, k=k)


class FiniteLocalRing:
    """Commutative finite local ring with elements encoded as ints 0..p^k-1.

    Both supported families share the encoding: an element is the base-p
    number whose digits are its coordinates (residue digits for Z/p^k,
    coefficients c0, c1, ... for F_p[t]/(t^k)). Digit 0 decides unit-ness in
    both cases. All arithmetic accepts numpy arrays and broadcasts.
    """

    def __init__(self, spec: RingSpec) -> None:
        self.spec = spec
        self.p = spec.p
        self.k = spec.k
        self.size = spec.size
        self.zero = 0
        self.one = 1

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec})"

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_unit(self, a):
        return np.asarray(a) % self.p != 0 if np.ndim(a) else bool(int(a) % self.p != 0)

    def invert(self, a: int) -> int:
        a = int(a)
        if not self.is_unit(a):
            raise NonUnit(f"{self.format(a)} is not a unit of {self.spec}")
        hits = np.flatnonzero(self.mul(a, self.elements()) == self.one)
        if len(hits) != 1:
            raise ArithmeticError(f"inverse of {self.format(a)} is not unique")
        return int(hits[0])

    def format(self, a: int) -> str:
        return str(int(a))

    def parse(self, text: str) -> int:
        try:
            return int(text.strip()) % self.size
        except ValueError:
            raise RingSpecError(f"cannot parse element {text!r} of {self.spec}") from None


class ZModRing(FiniteLocalRing):
    def add(self, a, b):
        return _ret((np.asarray(a) + np.asarray(b)) % self.size)

    def neg(self, a):
        return _ret((-np.asarray(a)) % self.size)

    def mul(self, a, b):
        return _ret((np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.size)


class TruncatedPolyRing(FiniteLocalRing):
    def _digits(self, a) -> List[np.ndarray]:
        a = np.asarray(a, dtype=np.int64)
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def _undigits(self, digits: List[np.ndarray]):
        total = sum(d * self.p**i for i, d in enumerate(digits))
        return _ret(np.asarray(total, dtype=np.int64))

    def add(self, a, b):
        da, db = self._digits(a), self._digits(b)
        return self._undigits([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a):
        return self._undigits([(-x) % self.p for x in self._digits(a)])

    def mul(self, a, b):
        da, db = self._digits(a), self._digits(b)
        out = []
        for m in range(self.k):
            c = sum(da[i] * db[m - i] for i in range(m + 1))
            out.append(c % self.p)
        return self._undigits(out)

    def format(self, a: int) -> str:
        coeffs = [int(d) for d in self._digits(int(a))]
        terms = []
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return "+".join(terms) if terms else "0"

    def parse(self, text: str) -> int:
        coeffs = [0] * self.k
        for raw in text.replace(" ", "").split("+"):
            m = _TERM_RE.match(raw)
            if not raw or not m:
                raise RingSpecError(f"cannot parse element {text!r} of {self.spec}")
            c = int(m.group(1)) if m.group(1) else 1
            deg = 0 if not m.group(2) else int(m.group(3) or 1)
            if deg < self.k:
                coeffs[deg] = (coeffs[deg] + c) % self.p
        return int(sum(c * self.p**i for i, c in enumerate(coeffs)))


def _ret(x: np.ndarray):
    return int(x) if np.ndim(x) == 0 else x


def construct_ring(spec: RingSpec, *, size_cap: int = DEFAULT_SIZE_CAP) -> FiniteLocalRing:
    if spec.kind not in ("zmod", "poly"):
        raise RingSpecError(f"unknown ring kind {spec.kind!r}")
    if spec.k < 1:
        raise RingSpecError(f"k={spec.k} must be at least 1")
    if spec.p < 2 or not sympy.isprime(spec.p):
        raise RingSpecError(f"p={spec.p} is not prime")
    if spec.size > size_cap:
        raise RingSpecError(f"ring {spec} has {spec.size} elements, over the cap {size_cap}")
    cls = ZModRing if spec.kind == "zmod" else TruncatedPolyRing
    logger.debug("constructing %s", spec)
    return cls(spec)


def ring_from_text(text: str, *, size_cap: int = DEFAULT_SIZE_CAP) -> FiniteLocalRing:
    return construct_ring(parse_ring_spec(text), size_cap=size_cap)


def is_unit(R: FiniteLocalRing, a: int) -> bool:
    return bool(R.is_unit(int(a)))


def invert(R: FiniteLocalRing, a: int) -> int:
    return R.invert(a)


def enumerate_elements(R: FiniteLocalRing) -> List[int]:
    return [int(a) for a in R.elements()]


def verify_ring(R: FiniteLocalRing) -> VerifyReport:
    els = R.elements()
    units = els[R.is_unit(els)]
    nonunits = els[~R.is_unit(els)]
    lab = R.format

    def assoc(a, b, c):
        return R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))

    def distrib(a, b, c):
        return R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))

    def comm(a, b):
        return R.mul(a, b) == R.mul(b, a)

    def ideal_sum(a, b):
        return ~R.is_unit(R.add(a, b))

    def ideal_absorb(a, b):
        return ~R.is_unit(R.mul(a, b))

    def inverse_involution(a):
        b = R.invert(a)
        return np.asarray(R.invert(b) == a)

    abc = [domain("a", els, lab), domain("b", els, lab), domain("c", els, lab)]
    checks = [
        sweep("ring.associativity", assoc, abc),
        sweep("ring.distributivity", distrib, abc),
        sweep("ring.commutativity", comm, abc[:2]),
        sweep("ring.nonunits_closed_under_sum", ideal_sum, [domain("a", nonunits, lab), domain("b", nonunits, lab)]),
        sweep("ring.nonunits_absorb", ideal_absorb, [domain("a", nonunits, lab), domain("b", els, lab)]),
        sweep("ring.inverse_involution", inverse_involution, [domain("a", units, lab)]),
        verdict(
            "ring.nonunit_index_p",
            R.size == R.spec.p * len(nonunits),
            {"size": str(R.size), "nonunits": str(len(nonunits))},
        ),
    ]
    facts = {
        "ring": str(R.spec),
        "size": R.size,
        "units": int(len(units)),
        "nonunits": int(len(nonunits)),
        "nonunit_index": R.size // max(1, len(nonunits)),
    }
    return VerifyReport.assemble(str(R.spec), checks, facts)
