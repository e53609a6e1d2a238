from fastapi import HTTPException

from app.core.errors import DiagnosticsError, DispatchLimitExceeded, UimlError


def http_error(exc: UimlError) -> HTTPException:
    """422 for diagnostics and runaway rules, 400 for every other compiler error"""
    if isinstance(exc, DiagnosticsError):
        return HTTPException(422, {"diagnostics": [d.model_dump(mode="json") for d in exc.diagnostics]})
    if isinstance(exc, DispatchLimitExceeded):
        return HTTPException(422, {"error": str(exc), "limit": exc.limit})
    return HTTPException(400, {"error": str(exc)})
