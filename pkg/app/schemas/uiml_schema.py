"""
UIML document model.

Immutable pydantic models mirroring the <uiml> tree: head, interfaces with
structure/style/content/behavior sections, and the <peers>/<template> sections
kept as opaque canonical XML text. Tagged unions use a `kind` discriminator.
"""
from typing import Annotated, Iterator, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


# Style properties in this namespace are developer mapping hints, not widget properties
HINT_PREFIX = "g:map-to:"


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class MetaEntry(_Frozen):
    name: str = Field(..., min_length=1)
    content: str = ""


# ── Structure ────────────────────────────────────────────────────────────────

class Part(_Frozen):
    name: str = Field(..., min_length=1)
    widget_class: str = Field(..., min_length=1)
    children: Tuple["Part", ...] = ()

    def walk(self) -> Iterator["Part"]:
        """Depth-first pre-order over this part and its descendants"""
        yield self
        for child in self.children:
            yield from child.walk()


class Structure(_Frozen):
    roots: Tuple[Part, ...] = ()

    @model_validator(mode="after")
    def _unique_part_names(self) -> "Structure":
        seen = set()
        for part in self.walk():
            if part.name in seen:
                raise ValueError(f"duplicate part name '{part.name}' in structure")
            seen.add(part.name)
        return self

    def walk(self) -> Iterator[Part]:
        for root in self.roots:
            yield from root.walk()


# ── Style ────────────────────────────────────────────────────────────────────

class PartSelector(_Frozen):
    kind: Literal["part"] = "part"
    name: str = Field(..., min_length=1)


class ClassSelector(_Frozen):
    kind: Literal["class"] = "class"
    name: str = Field(..., min_length=1)


Selector = Annotated[Union[PartSelector, ClassSelector], Field(discriminator="kind")]


class LiteralValue(_Frozen):
    kind: Literal["literal"] = "literal"
    text: str = ""


class ContentRef(_Frozen):
    kind: Literal["ref"] = "ref"
    constant: str = Field(..., min_length=1)


PropertyValue = Annotated[Union[LiteralValue, ContentRef], Field(discriminator="kind")]


class PropertyBinding(_Frozen):
    selector: Selector
    property_name: str = Field(..., min_length=1)
    value: PropertyValue


class Style(_Frozen):
    bindings: Tuple[PropertyBinding, ...] = ()


# ── Content ──────────────────────────────────────────────────────────────────

class Constant(_Frozen):
    name: str = Field(..., min_length=1)
    value: str = ""


class ContentSection(_Frozen):
    constants: Tuple[Constant, ...] = ()


# ── Behavior ─────────────────────────────────────────────────────────────────

class EventOccurs(_Frozen):
    kind: Literal["event"] = "event"
    source_part: Optional[str] = None
    event_class: str = Field(..., min_length=1)


class EventDataEquals(_Frozen):
    kind: Literal["data-equals"] = "data-equals"
    source_part: Optional[str] = None
    event_class: str = Field(..., min_length=1)
    data_key: str = Field(..., min_length=1)
    expected: str = ""


Condition = Annotated[Union[EventOccurs, EventDataEquals], Field(discriminator="kind")]


class LiteralArg(_Frozen):
    kind: Literal["literal"] = "literal"
    text: str = ""


class PropertyRef(_Frozen):
    kind: Literal["property"] = "property"
    part: str = Field(..., min_length=1)
    property_name: str = Field(..., min_length=1)


ArgRef = Annotated[Union[LiteralArg, PropertyRef], Field(discriminator="kind")]


class DataEntry(_Frozen):
    key: str = Field(..., min_length=1)
    value: str = ""


class SetProperty(_Frozen):
    kind: Literal["set-property"] = "set-property"
    part: str = Field(..., min_length=1)
    property_name: str = Field(..., min_length=1)
    value: str = ""


class CallExternal(_Frozen):
    kind: Literal["call"] = "call"
    function: str = Field(..., min_length=1)
    args: Tuple[ArgRef, ...] = ()


class FireEvent(_Frozen):
    kind: Literal["fire"] = "fire"
    event_class: str = Field(..., min_length=1)
    source_part: str = Field(..., min_length=1)
    data: Tuple[DataEntry, ...] = ()


class AddChild(_Frozen):
    kind: Literal["add"] = "add"
    parent: str = Field(..., min_length=1)
    subtree: Part


class Remove(_Frozen):
    kind: Literal["remove"] = "remove"
    part: str = Field(..., min_length=1)


RestructureOp = Annotated[Union[AddChild, Remove], Field(discriminator="kind")]


class Restructure(_Frozen):
    kind: Literal["restructure"] = "restructure"
    op: RestructureOp


Action = Annotated[
    Union[SetProperty, CallExternal, FireEvent, Restructure],
    Field(discriminator="kind"),
]


class Rule(_Frozen):
    condition: Condition
    actions: Tuple[Action, ...] = Field(..., min_length=1)


class Behavior(_Frozen):
    rules: Tuple[Rule, ...] = ()


# ── Document ─────────────────────────────────────────────────────────────────

class Interface(_Frozen):
    name: str = ""
    structures: Tuple[Structure, ...] = ()
    styles: Tuple[Style, ...] = ()
    contents: Tuple[ContentSection, ...] = ()
    behaviors: Tuple[Behavior, ...] = ()

    @property
    def structure(self) -> Structure:
        """The compiled structure: the first one, or an empty structure"""
        return self.structures[0] if self.structures else Structure()

    def bindings(self) -> Iterator[PropertyBinding]:
        for style in self.styles:
            yield from style.bindings

    def rules(self) -> Iterator[Rule]:
        for behavior in self.behaviors:
            yield from behavior.rules


class UimlDocument(_Frozen):
    head: Tuple[MetaEntry, ...] = ()
    interfaces: Tuple[Interface, ...] = ()
    preserved_peers: str = ""
    preserved_templates: str = ""
    source_name: str = ""

    @model_validator(mode="after")
    def _unique_interface_names(self) -> "UimlDocument":
        names = [i.name for i in self.interfaces]
        if len(names) != len(set(names)):
            raise ValueError("interface names must be unique")
        return self

    def meta(self, name: str) -> Optional[str]:
        for entry in self.head:
            if entry.name == name:
                return entry.content
        return None


Part.model_rebuild()
