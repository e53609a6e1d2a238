from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings


class EmitOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    indent: int = Field(default_factory=lambda: settings.default_indent, ge=0, le=8)
    # part whose `text` becomes the page/card title; falls back to meta Purpose
    title_source: Optional[str] = None
    include_prolog: bool = True
    interface_name: Optional[str] = None
