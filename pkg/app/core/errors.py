"""
Compiler exceptions and process exit codes.

Every operation documented as returning "X or Diagnostics" raises DiagnosticsError;
the remaining classes cover lookups and the behavior engine.
"""
from typing import List, Sequence

from app.schemas.diagnostic_schema import Diagnostic

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UimlError(Exception):
    """Base class for all compiler errors"""


class DiagnosticsError(UimlError):
    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics: List[Diagnostic] = list(diagnostics)
        first = next((d for d in self.diagnostics if d.is_error), None)
        summary = f"{first.code} {first.message}" if first else "no errors"
        super().__init__(f"{len(self.diagnostics)} diagnostic(s), first: {summary}")

    @property
    def errors(self) -> List[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]


class UnknownInterface(UimlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown interface '{name}'")


class UnknownPart(UimlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown part '{name}'")


class DanglingContentRef(UimlError):
    def __init__(self, constant: str):
        self.constant = constant
        super().__init__(f"content reference to missing constant '{constant}'")


class UnknownClass(UimlError):
    def __init__(self, name: str, vocabulary: str = ""):
        self.name = name
        super().__init__(f"unknown widget class '{name}'" + (f" in {vocabulary}" if vocabulary else ""))


class UnknownFamily(UimlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown platform family '{name}'")


class DispatchLimitExceeded(UimlError):
    def __init__(self, limit: int, dispatches: int):
        self.limit = limit
        self.dispatches = dispatches
        super().__init__(f"dispatch limit exceeded: {dispatches} dispatches (limit {limit})")


class RestructureConflict(UimlError):
    """Restructure action rejected; the runtime state is left untouched"""


class InvalidEvent(UimlError):
    """Incoming event not allowed for its source part"""


class SourceError(UimlError):
    """Input file missing, unreadable, oversized or not acceptable"""
