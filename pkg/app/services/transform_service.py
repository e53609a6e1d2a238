"""
Generic UIML -> platform UIML.

Each part keeps its name and position; only its class changes, chosen by
external hint, then in-document `g:map-to:<family>` hint, then the mapping
table default. Property names and event classes are renamed on the way.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from app.config import settings
from app.core.errors import DiagnosticsError, UnknownClass
from app.schemas.diagnostic_schema import Diagnostic, error
from app.schemas.transform_schema import HintSet, MappingPlan
from app.schemas.uiml_schema import (
    HINT_PREFIX,
    AddChild,
    Behavior,
    CallExternal,
    ClassSelector,
    FireEvent,
    Interface,
    LiteralValue,
    Part,
    PartSelector,
    PropertyBinding,
    PropertyRef,
    Restructure,
    Rule,
    SetProperty,
    Structure,
    Style,
    UimlDocument,
)
from app.schemas.vocabulary_schema import FamilyId, MappingTable, TargetOption, Vocabulary
from app.services.document_service import iter_parts
from app.services.source_service import read_json_source
from app.services.vocabulary_service import builtin_mapping_table, builtin_target_vocabulary, family_of, parse_json_model

logger = logging.getLogger(__name__)


# ── Hints ────────────────────────────────────────────────────────────────────

def extract_hints(doc: UimlDocument) -> HintSet:
    """Collect `g:map-to:<family>` bindings; the latest binding per part and family wins"""
    parts: Dict[str, Dict[str, str]] = {}
    diagnostics: List[Diagnostic] = []
    for interface in doc.interfaces:
        for binding in interface.bindings():
            if not binding.property_name.startswith(HINT_PREFIX):
                continue
            family_name = binding.property_name[len(HINT_PREFIX):]
            family = FamilyId.parse(family_name)
            if family is None:
                diagnostics.append(error("UIML201", f"mapping hint names unknown family '{family_name}'"))
                continue
            if not isinstance(binding.selector, PartSelector):
                diagnostics.append(error(
                    "UIML203", f"mapping hint for '{family_name}' must select a part, not class '{binding.selector.name}'"))
                continue
            if not isinstance(binding.value, LiteralValue) or not binding.value.text.strip():
                diagnostics.append(error(
                    "UIML203", f"mapping hint on part '{binding.selector.name}' must be a non-empty literal class name"))
                continue
            parts.setdefault(binding.selector.name, {})[family.value] = binding.value.text.strip()
    if diagnostics:
        raise DiagnosticsError(diagnostics)
    return HintSet(parts=parts)


def parse_hints(text: str) -> HintSet:
    hints = parse_json_model(text, HintSet, "hints")
    unknown = sorted({f for by_family in hints.parts.values() for f in by_family if FamilyId.parse(f) is None})
    if unknown:
        raise DiagnosticsError([error("UIML201", f"hints file names unknown family '{f}'") for f in unknown])
    return hints


def load_hints(path: str) -> HintSet:
    hints = parse_hints(read_json_source(path))
    logger.info(f"Loaded {len(hints)} external mapping hint(s) from {path}")
    return hints


# ── Planning ─────────────────────────────────────────────────────────────────

def _subtrees(interface: Interface) -> Iterator[Part]:
    for rule in interface.rules():
        for action in rule.actions:
            if isinstance(action, Restructure) and isinstance(action.op, AddChild):
                yield action.op.subtree


def planned_parts(doc: UimlDocument) -> Tuple[Dict[str, str], List[Diagnostic]]:
    """
    name -> generic class over every interface's first structure and AddChild
    payloads, then over parts that only later structures declare
    """
    classes: Dict[str, str] = {}
    diagnostics: List[Diagnostic] = []
    for interface in doc.interfaces:
        roots = list(interface.structure.roots) + list(_subtrees(interface))
        for root in roots:
            for part in root.walk():
                seen = classes.setdefault(part.name, part.widget_class)
                if seen != part.widget_class:
                    diagnostics.append(error(
                        "UIML204",
                        f"part name '{part.name}' is used with classes '{seen}' and '{part.widget_class}'"))
    # a reused name keeps its plan; the rewriter falls back to the default when the class differs
    for interface in doc.interfaces:
        for structure in interface.structures[1:]:
            for part in iter_parts(structure):
                classes.setdefault(part.name, part.widget_class)
    return classes, diagnostics


def plan(
    doc: UimlDocument,
    family,
    hints: Optional[HintSet] = None,
    external_hints: Optional[HintSet] = None,
    table: Optional[MappingTable] = None,
) -> MappingPlan:
    family = family_of(family)
    table = table or builtin_mapping_table(family)
    hints = hints or HintSet()
    external_hints = external_hints or HintSet()

    classes, diagnostics = planned_parts(doc)
    choices: Dict[str, str] = {}
    for name, generic_class in classes.items():
        options = table.options(generic_class)
        if not options:
            diagnostics.append(error(
                "UIML202", f"part '{name}': class '{generic_class}' has no mapping for {family.value}"))
            continue
        requested = external_hints.requested(name, family) or hints.requested(name, family)
        if requested is None:
            choices[name] = options[0].target_class
            continue
        if table.option(generic_class, requested) is None:
            allowed = ", ".join(o.target_class for o in options)
            diagnostics.append(error(
                "UIML202",
                f"part '{name}': '{requested}' is not a {family.value} option for '{generic_class}' (allowed: {allowed})"))
            continue
        choices[name] = requested

    for source in (external_hints, hints):
        for name in source.parts:
            if name not in classes:
                logger.warning(f"Mapping hint for unknown part '{name}' ignored")

    if diagnostics:
        raise DiagnosticsError(diagnostics)
    logger.info(f"Planned {len(choices)} part(s) for {family.value}")
    return MappingPlan(family=family, choices=choices)


def identity_mapping_table(vocab: Vocabulary, family) -> MappingTable:
    """Every class maps to itself; events and properties keep their names"""
    entries = {name: [{"target": name, "default": True}] for name in vocab.class_names}
    return MappingTable.model_validate({"family": family_of(family).value, "entries": entries})


# ── Rewriting ────────────────────────────────────────────────────────────────

class _PlatformRewriter:
    """Rewrites one interface according to a plan"""

    def __init__(self, interface: Interface, mapping: MappingPlan, table: MappingTable):
        self.interface = interface
        self.plan = mapping
        self.table = table
        self.options: Dict[str, TargetOption] = {}
        self.used: Dict[str, List[str]] = {}

    def option_for(self, part: Part) -> TargetOption:
        target = self.plan.choices.get(part.name)
        option = self.table.option(part.widget_class, target) if target else None
        option = option or self.table.default_option(part.widget_class)
        if option is None:
            raise UnknownClass(part.widget_class, f"mapping table '{self.table.family.value}'")
        return option

    def register(self, root: Part) -> None:
        for part in root.walk():
            option = self.option_for(part)
            self.options.setdefault(part.name, option)
            used = self.used.setdefault(part.widget_class, [])
            if option.target_class not in used:
                used.append(option.target_class)

    def part(self, part: Part) -> Part:
        return Part(
            name=part.name,
            widget_class=self.option_for(part).target_class,
            children=tuple(self.part(child) for child in part.children),
        )

    def rename(self, part_name: str, property_name: str) -> str:
        option = self.options.get(part_name)
        return option.rename(property_name) if option else property_name

    def bindings(self, style: Style) -> Iterable[PropertyBinding]:
        for binding in style.bindings:
            if binding.property_name.startswith(HINT_PREFIX):
                continue
            selector = binding.selector
            if isinstance(selector, PartSelector):
                yield binding.model_copy(update={"property_name": self.rename(selector.name, binding.property_name)})
                continue
            targets = self.used.get(selector.name)
            if not targets:
                default = self.table.default_option(selector.name)
                targets = [default.target_class] if default else [selector.name]
            for target in targets:
                option = self.table.option(selector.name, target)
                yield PropertyBinding(
                    selector=ClassSelector(name=target),
                    property_name=option.rename(binding.property_name) if option else binding.property_name,
                    value=binding.value,
                )

    def condition(self, condition):
        renamed = self.table.rename_event(condition.event_class)
        return condition.model_copy(update={"event_class": renamed})

    def action(self, action):
        if isinstance(action, SetProperty):
            return action.model_copy(update={"property_name": self.rename(action.part, action.property_name)})
        if isinstance(action, CallExternal):
            args = tuple(
                arg.model_copy(update={"property_name": self.rename(arg.part, arg.property_name)})
                if isinstance(arg, PropertyRef) else arg
                for arg in action.args
            )
            return action.model_copy(update={"args": args})
        if isinstance(action, FireEvent):
            return action.model_copy(update={"event_class": self.table.rename_event(action.event_class)})
        if isinstance(action, Restructure) and isinstance(action.op, AddChild):
            op = action.op.model_copy(update={"subtree": self.part(action.op.subtree)})
            return Restructure(op=op)
        return action

    def rewrite(self) -> Interface:
        for structure in self.interface.structures:
            for root in structure.roots:
                self.register(root)
        for subtree in _subtrees(self.interface):
            self.register(subtree)
        structures = tuple(
            Structure(roots=tuple(self.part(root) for root in structure.roots))
            for structure in self.interface.structures
        )
        behaviors = tuple(
            Behavior(rules=tuple(
                Rule(condition=self.condition(rule.condition), actions=tuple(self.action(a) for a in rule.actions))
                for rule in behavior.rules
            ))
            for behavior in self.interface.behaviors
        )
        styles = tuple(Style(bindings=tuple(self.bindings(style))) for style in self.interface.styles)
        return Interface(
            name=self.interface.name,
            structures=structures,
            styles=styles,
            contents=self.interface.contents,
            behaviors=behaviors,
        )


def to_platform(
    doc: UimlDocument,
    mapping: MappingPlan,
    target_vocab: Optional[Vocabulary] = None,
    table: Optional[MappingTable] = None,
) -> UimlDocument:
    """Rewrite `doc` into the plan's family. The result is tree-isomorphic to the input."""
    table = table or builtin_mapping_table(mapping.family)
    interfaces = tuple(_PlatformRewriter(i, mapping, table).rewrite() for i in doc.interfaces)
    vocab_name = target_vocab.name if target_vocab is not None else mapping.family.value
    logger.info(f"Transformed {doc.source_name or '<document>'} into {vocab_name}")
    return doc.model_copy(update={"interfaces": interfaces})


def _family_order(families: Iterable) -> Tuple[List[FamilyId], List[Diagnostic]]:
    chosen, diagnostics = set(), []
    for family in families:
        parsed = family if isinstance(family, FamilyId) else FamilyId.parse(family)
        if parsed is None:
            diagnostics.append(error("UIML201", f"unknown platform family '{family}'"))
        else:
            chosen.add(parsed)
    return [f for f in FamilyId if f in chosen], diagnostics


def split(
    doc: UimlDocument,
    families: Iterable,
    hints: Optional[HintSet] = None,
) -> List[Tuple[FamilyId, UimlDocument]]:
    """
    One platform document per family, in FamilyId order.

    `hints` are external hints; in-document hints are read from `doc`. Families
    are independent, so they run on a thread pool; all failures are reported
    together.
    """
    ordered, diagnostics = _family_order(families)
    if diagnostics:
        raise DiagnosticsError(diagnostics)
    if not ordered:
        return []
    in_document = extract_hints(doc)

    def one(family: FamilyId):
        try:
            mapping = plan(doc, family, in_document, hints)
            return to_platform(doc, mapping, builtin_target_vocabulary(family))
        except DiagnosticsError as e:
            return e

    with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
        results = list(executor.map(one, ordered))

    outputs = []
    for family, result in zip(ordered, results):
        if isinstance(result, DiagnosticsError):
            diagnostics.extend(result.diagnostics)
        else:
            outputs.append((family, result))
    if diagnostics:
        raise DiagnosticsError(diagnostics)
    return outputs
