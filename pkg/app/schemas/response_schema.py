from typing import List

from pydantic import BaseModel

from app.schemas.diagnostic_schema import Diagnostic


class ValidateResponse(BaseModel):
    valid: bool
    diagnostics: List[Diagnostic]


class LowerResponse(BaseModel):
    uiml: str


class RenderResponse(BaseModel):
    # RenderedFamily dicts; kept loose so cached entries are returned as stored
    results: List[dict]
    cached: bool = False


class SimulateResponse(BaseModel):
    trace: List[str]
