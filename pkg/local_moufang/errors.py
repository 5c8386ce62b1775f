from __future__ import annotations

from typing import Any, Dict, Optional


class LocalMoufangError(Exception):
    """Base class for every error raised by this package."""


class RingSpecError(LocalMoufangError, ValueError):
    pass


class SchemaError(LocalMoufangError, ValueError):
    """Malformed Moufang JSON; `location` points at the offending key."""

    def __init__(self, message: str, location: str = "$") -> None:
        super().__init__(f"{location}: {message}")
        self.location = location


class SideMismatch(LocalMoufangError, ValueError):
    pass


class NonUnit(LocalMoufangError, ArithmeticError):
    pass


class NotInvertible(LocalMoufangError, ArithmeticError):
    pass


class ENotInvertible(NotInvertible):
    pass


class NotQuasiInvertible(LocalMoufangError, ArithmeticError):
    pass


class NotQuadratic(LocalMoufangError):
    pass


class NotUnit(LocalMoufangError, ValueError):
    pass


class SideViolation(LocalMoufangError, ValueError):
    pass


class HypothesisFailed(LocalMoufangError):
    def __init__(self, message: str, witness: Optional[Dict[str, str]] = None) -> None:
        super().__init__(message)
        self.witness = witness or {}


class NoSolution(LocalMoufangError):
    pass


class NotUnique(LocalMoufangError):
    pass


class CapExceeded(LocalMoufangError):
    pass


class ConstructionError(LocalMoufangError):
    """A violated construction condition (C1, C1', C2, partition or group data)."""

    def __init__(
        self, code: str, message: str, witness: Optional[Dict[str, str]] = None
    ) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code
        self.witness = witness or {}


class ExtractionError(LocalMoufangError):
    """Extraction refused; `report` holds the failed precondition checks when available."""

    def __init__(self, message: str, report: Optional[Any] = None) -> None:
        super().__init__(message)
        self.report = report


class InvariantViolation(LocalMoufangError, AssertionError):
    """An internal consistency check failed; the input is not local or not Moufang."""
