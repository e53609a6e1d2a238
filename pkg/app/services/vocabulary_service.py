"""
Widget vocabularies, generic→target mapping tables, and document validation.

Built-in tables come from app.utils.builtin_tables and are loaded through the
same schemas as user files. validate_document never raises: every finding is
returned as a Diagnostic.
"""
import json
import logging
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from pydantic import BaseModel, ValidationError

from app.config import settings
from app.core.errors import DiagnosticsError, UnknownClass, UnknownFamily
from app.schemas.diagnostic_schema import Diagnostic, error, has_errors, warning
from app.schemas.uiml_schema import (
    HINT_PREFIX,
    AddChild,
    CallExternal,
    ClassSelector,
    ContentRef,
    EventDataEquals,
    FireEvent,
    Interface,
    Part,
    PartSelector,
    PropertyRef,
    Remove,
    Restructure,
    SetProperty,
    UimlDocument,
)
from app.schemas.vocabulary_schema import EventDef, FamilyId, MappingTable, TargetOption, Vocabulary, WidgetClassDef
from app.services.document_service import constants, iter_parts
from app.services.source_service import read_json_source
from app.utils.builtin_tables import GENERIC_VOCABULARY, MAPPING_TABLES, TARGET_VOCABULARIES

logger = logging.getLogger(__name__)

# (interface name, part name) -> source line of the <part> element
SourceMap = Mapping[Tuple[str, str], int]


# ── Schema loading ───────────────────────────────────────────────────────────

def schema_diagnostics(exc: ValidationError, what: str, code: str = "UIML108") -> List[Diagnostic]:
    diagnostics = []
    for err in exc.errors():
        location = ".".join(str(p) for p in err.get("loc", ())) or "<root>"
        diagnostics.append(error(code, f"{what} schema violation at {location}: {err.get('msg')}"))
    return diagnostics


def parse_json_model(text: str, model: type, what: str, code: str = "UIML108") -> BaseModel:
    """Decode JSON text into `model`, raising DiagnosticsError on failure"""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagnosticsError([error(code, f"{what} is not valid JSON: {e.msg}", e.lineno, e.colno)])
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise DiagnosticsError(schema_diagnostics(e, what, code))


def check_vocabulary(vocab: Vocabulary) -> List[Diagnostic]:
    diagnostics = []
    seen = set()
    for cls in vocab.widget_class_defs:
        if cls.name in seen:
            diagnostics.append(error("UIML107", f"duplicate widget class '{cls.name}' in vocabulary '{vocab.name}'"))
        seen.add(cls.name)
        props = [p.name for p in cls.allowed_properties]
        for name in sorted({p for p in props if props.count(p) > 1}):
            diagnostics.append(error("UIML107", f"class '{cls.name}' declares property '{name}' more than once"))
        events = [e.event_class for e in cls.allowed_events]
        for name in sorted({e for e in events if events.count(e) > 1}):
            diagnostics.append(error("UIML107", f"class '{cls.name}' declares event '{name}' more than once"))
    return diagnostics


def parse_vocabulary(text: str) -> Vocabulary:
    vocab = parse_json_model(text, Vocabulary, "vocabulary")
    diagnostics = check_vocabulary(vocab)
    if diagnostics:
        raise DiagnosticsError(diagnostics)
    return vocab


def load_vocabulary(path: str) -> Vocabulary:
    vocab = parse_vocabulary(read_json_source(path))
    logger.info(f"Loaded vocabulary '{vocab.name}' with {len(vocab)} classes from {path}")
    return vocab


def dump_vocabulary(vocab: Vocabulary) -> str:
    return vocab.model_dump_json(by_alias=True, indent=2) + "\n"


def save_vocabulary(vocab: Vocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_vocabulary(vocab))


def parse_mapping_table(text: str) -> MappingTable:
    return parse_json_model(text, MappingTable, "mapping table")


def load_mapping_table(path: str) -> MappingTable:
    return parse_mapping_table(read_json_source(path))


def save_mapping_table(table: MappingTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(table.model_dump_json(by_alias=True, indent=2) + "\n")


def check_mapping_table(table: MappingTable, generic: Vocabulary, target: Vocabulary) -> List[Diagnostic]:
    """Totality over the generic vocabulary and closure into the target vocabulary"""
    diagnostics = []
    for cls in generic.widget_class_defs:
        options = table.entries.get(cls.name)
        if not options:
            diagnostics.append(error("UIML108", f"mapping table '{table.family.value}' has no option for '{cls.name}'"))
            continue
        for option in options:
            target_cls = target.get(option.target_class)
            if target_cls is None:
                diagnostics.append(error(
                    "UIML101", f"'{cls.name}' maps to '{option.target_class}', unknown in '{target.name}'"))
                continue
            for prop in cls.allowed_properties:
                if target_cls.property_def(option.rename(prop.name)) is None:
                    diagnostics.append(error(
                        "UIML103",
                        f"'{cls.name}.{prop.name}' has no counterpart on '{option.target_class}'"))
            for event in cls.allowed_events:
                if target_cls.event_def(table.rename_event(event.event_class)) is None:
                    diagnostics.append(error(
                        "UIML104",
                        f"'{cls.name}' event '{event.event_class}' has no counterpart on '{option.target_class}'"))
            if cls.container and not target_cls.container:
                diagnostics.append(error(
                    "UIML102", f"container '{cls.name}' maps to non-container '{option.target_class}'"))
    return diagnostics


# ── Built-ins ────────────────────────────────────────────────────────────────

def family_of(value) -> FamilyId:
    if isinstance(value, FamilyId):
        return value
    family = FamilyId.parse(value)
    if family is None:
        raise UnknownFamily(str(value))
    return family


@lru_cache(maxsize=None)
def builtin_generic_vocabulary() -> Vocabulary:
    return Vocabulary.model_validate(GENERIC_VOCABULARY)


@lru_cache(maxsize=None)
def builtin_target_vocabulary(family) -> Vocabulary:
    return Vocabulary.model_validate(TARGET_VOCABULARIES[family_of(family).value])


@lru_cache(maxsize=None)
def builtin_mapping_table(family) -> MappingTable:
    return MappingTable.model_validate(MAPPING_TABLES[family_of(family).value])


def mapping_options(generic_class: str, family, table: Optional[MappingTable] = None) -> List[TargetOption]:
    """Target options for a generic class in a family, default first"""
    table = table or builtin_mapping_table(family)
    options = table.options(generic_class)
    if not options:
        raise UnknownClass(generic_class, f"mapping table '{table.family.value}'")
    return options


# ── Validation ───────────────────────────────────────────────────────────────

def _kind_ok(kind: str, value: str) -> bool:
    if kind == "boolean":
        return value in ("true", "false")
    if kind == "number":
        try:
            float(value)
        except ValueError:
            return False
    return True


class _InterfaceValidator:
    """Checks one interface against a vocabulary, collecting diagnostics in order"""

    def __init__(self, interface: Interface, vocab: Vocabulary, source_map: Optional[SourceMap]):
        self.interface = interface
        self.vocab = vocab
        self.source_map = source_map or {}
        self.diagnostics: List[Diagnostic] = []
        self.known: Dict[str, str] = {}
        self.table = constants(interface)

    def line(self, part_name: Optional[str]) -> int:
        return self.source_map.get((self.interface.name, part_name), 0) if part_name else 0

    def report(self, code: str, message: str, part_name: Optional[str] = None) -> None:
        line = self.line(part_name)
        self.diagnostics.append(error(code, message, line, 1 if line else 0))

    def class_of(self, part_name: str, context: str) -> Optional[WidgetClassDef]:
        widget_class = self.known.get(part_name)
        if widget_class is None:
            self.report("UIML105", f"{context} refers to unknown part '{part_name}'")
            return None
        return self.vocab.get(widget_class)

    def run(self) -> List[Diagnostic]:
        for structure in self.interface.structures:
            for root in structure.roots:
                self.check_tree(root)
        in_structure = {part.name for part in iter_parts(self.interface.structure)}
        for rule in self.interface.rules():
            for action in rule.actions:
                if isinstance(action, Restructure) and isinstance(action.op, AddChild):
                    self.check_subtree_names(action.op.subtree, in_structure)
                    self.check_tree(action.op.subtree)
        for binding in self.interface.bindings():
            self.check_binding(binding)
        for rule in self.interface.rules():
            self.check_rule(rule)
        return self.diagnostics

    def check_tree(self, root: Part) -> None:
        for part in root.walk():
            self.known.setdefault(part.name, part.widget_class)
            cls = self.vocab.get(part.widget_class)
            if cls is None:
                self.report("UIML101", f"part '{part.name}' has unknown class '{part.widget_class}'", part.name)
            elif part.children and not cls.container:
                self.report(
                    "UIML102",
                    f"part '{part.name}' of non-container class '{part.widget_class}' has children",
                    part.name)

    def check_subtree_names(self, subtree: Part, in_structure: Set[str]) -> None:
        seen: Set[str] = set()
        for part in subtree.walk():
            if part.name in seen:
                self.report("UIML002", f"restructure adds part name '{part.name}' twice", part.name)
            elif part.name in in_structure:
                self.report("UIML002", f"restructure adds part '{part.name}', already in the structure", part.name)
            seen.add(part.name)

    def check_property(self, cls: WidgetClassDef, property_name: str, value: Optional[str], part_name: Optional[str]) -> None:
        prop = cls.property_def(property_name)
        if prop is None:
            self.report("UIML103", f"property '{property_name}' not allowed for class '{cls.name}'", part_name)
        elif value is not None and not _kind_ok(prop.kind, value):
            self.report(
                "UIML110", f"value {value!r} is not a valid {prop.kind} for '{cls.name}.{property_name}'", part_name)

    def check_binding(self, binding) -> None:
        if binding.property_name.startswith(HINT_PREFIX):
            return
        value = binding.value
        resolved: Optional[str]
        if isinstance(value, ContentRef):
            resolved = self.table.get(value.constant)
            if resolved is None:
                self.report("UIML106", f"binding '{binding.property_name}' refers to missing constant '{value.constant}'")
        else:
            resolved = value.text
        selector = binding.selector
        if isinstance(selector, PartSelector):
            cls = self.class_of(selector.name, f"style binding '{binding.property_name}'")
            if cls is not None:
                self.check_property(cls, binding.property_name, resolved, selector.name)
        elif isinstance(selector, ClassSelector):
            cls = self.vocab.get(selector.name)
            if cls is None:
                self.report("UIML101", f"style binding names unknown class '{selector.name}'")
            else:
                self.check_property(cls, binding.property_name, resolved, None)

    def event_def(self, event_class: str, source_part: Optional[str], context: str) -> Optional[EventDef]:
        if source_part:
            cls = self.class_of(source_part, context)
            if cls is None:
                return None
            event = cls.event_def(event_class)
            if event is None:
                self.report("UIML104", f"{context}: event '{event_class}' not allowed for class '{cls.name}'", source_part)
            return event
        for cls in self.vocab.widget_class_defs:
            event = cls.event_def(event_class)
            if event is not None:
                return event
        self.report("UIML104", f"{context}: event '{event_class}' is not declared by any class")
        return None

    def check_data_keys(self, event: Optional[EventDef], keys: Iterable[str], context: str) -> None:
        if event is None:
            return
        for key in keys:
            if key not in event.data_keys:
                self.report("UIML109", f"{context}: event '{event.event_class}' carries no data key '{key}'")

    def check_rule(self, rule) -> None:
        condition = rule.condition
        event = self.event_def(condition.event_class, condition.source_part, "rule condition")
        if isinstance(condition, EventDataEquals):
            self.check_data_keys(event, [condition.data_key], "rule condition")
        for action in rule.actions:
            if isinstance(action, SetProperty):
                cls = self.class_of(action.part, "set-property action")
                if cls is not None:
                    self.check_property(cls, action.property_name, action.value, action.part)
            elif isinstance(action, CallExternal):
                for arg in action.args:
                    if isinstance(arg, PropertyRef):
                        cls = self.class_of(arg.part, f"call '{action.function}'")
                        if cls is not None:
                            self.check_property(cls, arg.property_name, None, arg.part)
            elif isinstance(action, FireEvent):
                fired = self.event_def(action.event_class, action.source_part, "fire-event action")
                self.check_data_keys(fired, [d.key for d in action.data], "fire-event action")
            elif isinstance(action, Restructure):
                if isinstance(action.op, AddChild):
                    cls = self.class_of(action.op.parent, "restructure add")
                    if cls is not None and not cls.container:
                        self.report(
                            "UIML102",
                            f"restructure adds a child under non-container part '{action.op.parent}'",
                            action.op.parent)
                elif isinstance(action.op, Remove):
                    self.class_of(action.op.part, "restructure remove")


def cap(diagnostics: List[Diagnostic]) -> List[Diagnostic]:
    limit = settings.max_diagnostics
    if len(diagnostics) <= limit:
        return diagnostics
    kept = diagnostics[:limit]
    kept.append(warning("UIML011", f"diagnostic limit of {limit} reached; {len(diagnostics) - limit} more suppressed"))
    return kept


def validate_document(doc: UimlDocument, vocab: Vocabulary, source_map: Optional[SourceMap] = None) -> List[Diagnostic]:
    diagnostics: List[Diagnostic] = []
    for interface in doc.interfaces:
        diagnostics.extend(_InterfaceValidator(interface, vocab, source_map).run())
    diagnostics = cap(diagnostics)
    if has_errors(diagnostics):
        logger.info(f"{doc.source_name or '<document>'}: {len(diagnostics)} diagnostic(s) against '{vocab.name}'")
    return diagnostics
