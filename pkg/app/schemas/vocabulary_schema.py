"""
Vocabulary and mapping-table schemas.

The JSON field names (`class`, `dataKeys`, `target`, `renames`) are the on-disk
format; Python code uses the snake_case attribute names.
"""
from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FamilyId(str, Enum):
    HTML_DESKTOP = "html-desktop"
    WML_PHONE = "wml-phone"
    VOICE = "voice"

    @classmethod
    def parse(cls, value: str) -> Optional["FamilyId"]:
        try:
            return cls(value)
        except ValueError:
            return None


class _Schema(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")


class PropertyDef(_Schema):
    name: str = Field(..., min_length=1)
    kind: Literal["text", "number", "boolean"] = "text"


class EventDef(_Schema):
    event_class: str = Field(..., min_length=1, alias="class")
    data_keys: List[str] = Field(default_factory=list, alias="dataKeys")


class WidgetClassDef(_Schema):
    name: str = Field(..., min_length=1)
    container: bool = False
    allowed_properties: List[PropertyDef] = Field(default_factory=list, alias="properties")
    allowed_events: List[EventDef] = Field(default_factory=list, alias="events")

    def property_def(self, name: str) -> Optional[PropertyDef]:
        return next((p for p in self.allowed_properties if p.name == name), None)

    def event_def(self, event_class: str) -> Optional[EventDef]:
        return next((e for e in self.allowed_events if e.event_class == event_class), None)


class Vocabulary(_Schema):
    name: str = Field(..., min_length=1)
    widget_class_defs: List[WidgetClassDef] = Field(default_factory=list, alias="classes")

    def get(self, class_name: str) -> Optional[WidgetClassDef]:
        return next((c for c in self.widget_class_defs if c.name == class_name), None)

    def __contains__(self, class_name: str) -> bool:
        return self.get(class_name) is not None

    def __len__(self) -> int:
        return len(self.widget_class_defs)

    @property
    def class_names(self) -> List[str]:
        return [c.name for c in self.widget_class_defs]


class TargetOption(_Schema):
    target_class: str = Field(..., min_length=1, alias="target")
    default: bool = False
    property_renames: Dict[str, str] = Field(default_factory=dict, alias="renames")

    def rename(self, property_name: str) -> str:
        return self.property_renames.get(property_name, property_name)


class MappingTable(_Schema):
    family: FamilyId
    entries: Dict[str, List[TargetOption]] = Field(default_factory=dict)
    events: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _one_default_per_entry(self) -> "MappingTable":
        for generic_class, options in self.entries.items():
            if not options:
                raise ValueError(f"{generic_class}: at least one target option is required")
            defaults = sum(1 for o in options if o.default)
            if defaults != 1:
                raise ValueError(f"{generic_class}: exactly one default option is required, found {defaults}")
        return self

    def options(self, generic_class: str) -> Optional[List[TargetOption]]:
        """Options for a generic class, default first"""
        options = self.entries.get(generic_class)
        if options is None:
            return None
        return sorted(options, key=lambda o: not o.default)

    def option(self, generic_class: str, target_class: str) -> Optional[TargetOption]:
        return next((o for o in self.entries.get(generic_class, []) if o.target_class == target_class), None)

    def default_option(self, generic_class: str) -> Optional[TargetOption]:
        return next((o for o in self.entries.get(generic_class, []) if o.default), None)

    def rename_event(self, event_class: str) -> str:
        return self.events.get(event_class, event_class)
