"""
Runtime types of the behavior interpreter: events, state and trace entries.

Every trace entry renders to one stable line; the simulate command prints
these lines and golden tests compare them.
"""
import json
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, RootModel

from app.schemas.uiml_schema import Structure


def _quote(text: Optional[str]) -> str:
    return "<unset>" if text is None else json.dumps(text, ensure_ascii=False)


class Event(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    event_class: str = Field(..., min_length=1, alias="class")
    source_part: str = Field(..., min_length=1, alias="source")
    data: Dict[str, str] = Field(default_factory=dict)

    def label(self) -> str:
        return f"{self.event_class}@{self.source_part}"


class EventScript(RootModel[List[Event]]):
    """Events file: a JSON list of {class, source, data}"""


class RuntimeState(BaseModel):
    model_config = ConfigDict(frozen=True)

    properties: Dict[Tuple[str, str], str] = Field(default_factory=dict)
    structure: Structure = Field(default_factory=Structure)
    dispatch_count: int = Field(default=0, ge=0)

    def get(self, part: str, property_name: str) -> Optional[str]:
        return self.properties.get((part, property_name))


class PropertySet(BaseModel):
    kind: Literal["set"] = "set"
    part: str
    property_name: str
    old: Optional[str] = None
    new: str

    def render(self) -> str:
        return f"SET {self.part}.{self.property_name} {_quote(self.old)} -> {_quote(self.new)}"


class ExternalCall(BaseModel):
    kind: Literal["call"] = "call"
    function: str
    args: Tuple[str, ...] = ()
    result: Optional[str] = None

    def render(self) -> str:
        line = f"CALL {self.function}({', '.join(_quote(a) for a in self.args)})"
        return line if self.result is None else f"{line} = {_quote(self.result)}"


class EventFired(BaseModel):
    kind: Literal["fire"] = "fire"
    event: Event

    def render(self) -> str:
        line = f"FIRE {self.event.label()}"
        if self.event.data:
            line += " " + json.dumps(self.event.data, ensure_ascii=False)
        return line


class Restructured(BaseModel):
    kind: Literal["restructure"] = "restructure"
    op: Literal["add", "remove"]
    part: str
    parent: Optional[str] = None

    def render(self) -> str:
        if self.op == "add":
            return f"RESTRUCTURE add {self.part} under {self.parent}"
        return f"RESTRUCTURE remove {self.part}"


class NoRuleMatched(BaseModel):
    kind: Literal["nomatch"] = "nomatch"
    event: Event

    def render(self) -> str:
        return f"NOMATCH {self.event.label()}"


TraceEntry = Annotated[
    Union[PropertySet, ExternalCall, EventFired, Restructured, NoRuleMatched],
    Field(discriminator="kind"),
]


def render_trace(trace: List[TraceEntry]) -> str:
    return "".join(entry.render() + "\n" for entry in trace)
