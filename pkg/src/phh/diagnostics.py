"""Diagnostics and exceptions shared by the parser, validator and engine."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

Location = Union[str, int, None]


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A machine-readable finding.

    ``location`` is a field name, an action index (0-based position in the
    ``actions`` array) or ``None`` for whole-file problems.
    """

    severity: Severity
    code: str
    location: Location
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "location": self.location,
            "message": self.message,
        }

    def __str__(self) -> str:
        where = "" if self.location is None else f" [{self.location}]"
        return f"{self.severity.value}: {self.code}{where}: {self.message}"


def error(code: str, location: Location, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, location, message)


def warning(code: str, location: Location, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, location, message)


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


class PHHError(ValueError):
    """Base class for every error raised by this package.

    ``code`` mirrors the diagnostic codes so callers can switch on it.
    """

    code = "PHHError"

    def __init__(self, message: str, code: str | None = None, diagnostics=()):
        super().__init__(message)
        if code is not None:
            self.code = code
        self.diagnostics = tuple(diagnostics)


class CardError(PHHError):
    code = "BadCards"


class UnknownRankChar(CardError):
    code = "UnknownRankChar"


class UnknownSuitChar(CardError):
    code = "UnknownSuitChar"


class BadLength(CardError):
    code = "BadLength"


class OddLength(CardError):
    code = "OddLength"


class DocumentError(PHHError):
    """Raised by the convenience loaders when a document has errors."""

    code = "InvalidDocument"


class EvaluationError(PHHError):
    code = "EvaluationError"


class RuleViolation(PHHError):
    """Raised by the replay engine under strict rule checking."""

    code = "RuleViolation"

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.message, diagnostic.code, (diagnostic,))
        self.diagnostic = diagnostic
