"""
HTTP request bodies. UIML travels as text; the JSON-shaped inputs (hints,
events, logical model) are embedded as objects.
"""
from typing import List, Optional

from pydantic import BaseModel, Field

from app.schemas.behavior_schema import Event
from app.schemas.logical_schema import LogicalModel
from app.schemas.transform_schema import HintSet


class SourceRequest(BaseModel):
    uiml: str = Field(..., min_length=1, description="UIML document text")
    source_name: str = Field("request.uiml", description="Name used in diagnostics")


class ValidateRequest(SourceRequest):
    pass


class RenderRequest(SourceRequest):
    families: List[str] = Field(..., min_length=1, description="Family ids: html-desktop, wml-phone, voice")
    hints: Optional[HintSet] = None
    indent: Optional[int] = Field(None, ge=0, le=8)


class SimulateRequest(SourceRequest):
    events: List[Event] = Field(default_factory=list)
    interface_name: Optional[str] = None


class LowerRequest(BaseModel):
    model: LogicalModel
