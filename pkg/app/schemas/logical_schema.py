"""
Logical model: an abstract interaction tree lowered to generic UIML.

Five provisional node kinds. Only groups have children; choices carry options
and triggers carry the name of the external action they invoke.
"""
from typing import Iterator, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

NodeKind = Literal["group", "text-input", "choice", "trigger", "caption"]


class LogicalNode(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: NodeKind
    name: str = Field(..., min_length=1)
    label: str = ""
    options: List[str] = Field(default_factory=list)
    action: Optional[str] = None
    children: List["LogicalNode"] = Field(default_factory=list)

    def walk(self) -> Iterator["LogicalNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


class LogicalModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    title: str = Field(..., min_length=1)
    root: LogicalNode


LogicalNode.model_rebuild()
