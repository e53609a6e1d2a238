from enum import Enum
from pydantic import BaseModel, ConfigDict, Field


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Diagnostic(BaseModel):
    """
    One compiler finding.

    line/column are 1-based when the finding is anchored in the input;
    0 means the finding has no source position (e.g. a JSON schema error).
    """
    model_config = ConfigDict(frozen=True)

    severity: Severity = Severity.ERROR
    code: str = Field(..., pattern=r"^UIML\d{3}$")
    message: str
    line: int = Field(default=0, ge=0)
    column: int = Field(default=0, ge=0)

    @property
    def is_error(self) -> bool:
        return self.severity == Severity.ERROR

    def format(self, source: str = "") -> str:
        """`file:line:col: code message`, the CLI's one-line form"""
        if self.line:
            return f"{source}:{self.line}:{self.column}: {self.code} {self.message}"
        return f"{source}: {self.code} {self.message}"


def error(code: str, message: str, line: int = 0, column: int = 0) -> Diagnostic:
    return Diagnostic(severity=Severity.ERROR, code=code, message=message, line=line, column=column)


def warning(code: str, message: str, line: int = 0, column: int = 0) -> Diagnostic:
    return Diagnostic(severity=Severity.WARNING, code=code, message=message, line=line, column=column)


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)
