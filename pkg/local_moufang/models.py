from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


class Side(Enum):
    PLUS = "+"
    MINUS = "-"

    def __neg__(self) -> "Side":
        return Side.MINUS if self is Side.PLUS else Side.PLUS

    @property
    def index(self) -> int:
        return 0 if self is Side.PLUS else 1


@dataclass(frozen=True, slots=True)
class RingSpec:
    kind: str  # "zmod" | "poly"
    p: int
    k: int

    @property
    def size(self) -> int:
        return self.p**self.k

    def __str__(self) -> str:
        return f"{self.kind}:{self.p}:{self.k}"


@dataclass(frozen=True, slots=True)
class JElem:
    side: Side
    value: int


@dataclass(frozen=True, slots=True)
class ProjPoint:
    form: str  # "A" (affine [x,0]) | "R" (radical offset [e, e^-1 + y])
    value: int

    @property
    def is_affine(self) -> bool:
        return self.form == "A"


@dataclass(frozen=True, slots=True)
class Check:
    name: str
    status: str
    witness: Optional[Dict[str, str]] = None
    note: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"name": self.name, "status": self.status}
        if self.witness is not None:
            d["witness"] = dict(self.witness)
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class VerifyReport:
    subject: str
    checks: Tuple[Check, ...]
    facts: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def assemble(
        cls, subject: str, checks: Iterable[Check], facts: Optional[Dict[str, Any]] = None
    ) -> "VerifyReport":
        ordered = sorted(checks, key=lambda c: c.name)
        return cls(subject=subject, checks=tuple(ordered), facts=dict(facts or {}))

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if c.failed]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def prefixed(self, prefix: str) -> List[Check]:
        """Checks renamed under `prefix/`, for embedding in a larger report."""
        return [
            Check(f"{prefix}/{c.name}", c.status, c.witness, c.note) for c in self.checks
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "facts": self.facts,
        }


@dataclass(frozen=True, slots=True)
class GroupSummary:
    order: int
    generators: int
    pair_transitive: bool
    pair_count: int
    witness: Optional[Dict[str, str]] = None


@dataclass(frozen=True, slots=True)
class VerifyConfig:
    size_cap: int = 3125
    group_cap: int = 200_000
    deep: bool = False
    full_conjugation: bool = False
    workers: int = 1
