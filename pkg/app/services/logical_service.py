"""
Logical model loading and lowering to generic UIML.

Lowering rules:
    group       -> GArea
    caption     -> GLabel
    text-input  -> GLabel "<name>Label" + GText "<name>"
    choice      -> GLabel "<name>Label" + GList "<name>" (options joined into `items`)
    trigger     -> GButton "<name>" + rule GActionEvent -> call <action>
The root group is wrapped in a GTopContainer named "<title>Window". Visible
labels live in the content section and are bound through references.
"""
import logging
import re
from typing import List, Set

from app.core.errors import DiagnosticsError
from app.schemas.diagnostic_schema import Diagnostic, error
from app.schemas.logical_schema import LogicalModel, LogicalNode
from app.schemas.uiml_schema import (
    Behavior,
    CallExternal,
    Constant,
    ContentRef,
    ContentSection,
    EventOccurs,
    Interface,
    LiteralValue,
    MetaEntry,
    Part,
    PartSelector,
    PropertyBinding,
    Rule,
    Structure,
    Style,
    UimlDocument,
)
from app.services.source_service import read_json_source
from app.services.vocabulary_service import parse_json_model

logger = logging.getLogger(__name__)

ACTION_EVENT = "GActionEvent"


def check_logical(model: LogicalModel) -> List[Diagnostic]:
    diagnostics = []
    if model.root.kind != "group":
        diagnostics.append(error("UIML301", f"root node '{model.root.name}' must be a group, not {model.root.kind}"))
    seen = set()
    for node in model.root.walk():
        if node.name in seen:
            diagnostics.append(error("UIML302", f"duplicate node name '{node.name}'"))
        seen.add(node.name)
        if node.kind != "group" and node.children:
            diagnostics.append(error("UIML304", f"{node.kind} node '{node.name}' cannot have children"))
        if node.kind == "choice" and not node.options:
            diagnostics.append(error("UIML303", f"choice '{node.name}' has no options"))
        if node.kind == "trigger" and not node.action:
            diagnostics.append(error("UIML301", f"trigger '{node.name}' has no action"))
    return diagnostics


def parse_logical(text: str) -> LogicalModel:
    model = parse_json_model(text, LogicalModel, "logical model", code="UIML301")
    diagnostics = check_logical(model)
    if diagnostics:
        raise DiagnosticsError(diagnostics)
    return model


def load_logical(path: str) -> LogicalModel:
    model = parse_logical(read_json_source(path))
    logger.info(f"Loaded logical model '{model.title}' from {path}")
    return model


def window_name(title: str) -> str:
    return (re.sub(r"\W+", "", title) or "Main") + "Window"


class _Lowering:
    def __init__(self):
        self.names: Set[str] = set()
        self.bindings: List[PropertyBinding] = []
        self.constants: List[Constant] = []
        self.rules: List[Rule] = []
        self.diagnostics: List[Diagnostic] = []

    def claim(self, name: str) -> None:
        if name in self.names:
            self.diagnostics.append(error("UIML305", f"generated part name '{name}' is not unique"))
        self.names.add(name)

    def labelled(self, name: str, widget_class: str, label: str) -> Part:
        self.claim(name)
        constant = f"{name}Text"
        self.constants.append(Constant(name=constant, value=label))
        self.bindings.append(PropertyBinding(
            selector=PartSelector(name=name), property_name="text", value=ContentRef(constant=constant)))
        return Part(name=name, widget_class=widget_class)

    def node(self, node: LogicalNode) -> List[Part]:
        if node.kind == "group":
            self.claim(node.name)
            children = tuple(part for child in node.children for part in self.node(child))
            return [Part(name=node.name, widget_class="GArea", children=children)]
        if node.kind == "caption":
            return [self.labelled(node.name, "GLabel", node.label)]
        if node.kind == "trigger":
            button = self.labelled(node.name, "GButton", node.label or node.name)
            self.rules.append(Rule(
                condition=EventOccurs(source_part=node.name, event_class=ACTION_EVENT),
                actions=(CallExternal(function=node.action),),
            ))
            return [button]

        label = self.labelled(f"{node.name}Label", "GLabel", node.label)
        if node.kind == "text-input":
            self.claim(node.name)
            return [label, Part(name=node.name, widget_class="GText")]
        self.claim(node.name)
        self.bindings.append(PropertyBinding(
            selector=PartSelector(name=node.name),
            property_name="items",
            value=LiteralValue(text="\n".join(node.options)),
        ))
        return [label, Part(name=node.name, widget_class="GList")]


def lower(model: LogicalModel) -> UimlDocument:
    """Generic UIML document for a logical model"""
    diagnostics = check_logical(model)
    if diagnostics:
        raise DiagnosticsError(diagnostics)

    lowering = _Lowering()
    top = window_name(model.title)
    lowering.claim(top)
    root = Part(name=top, widget_class="GTopContainer", children=tuple(lowering.node(model.root)))
    if lowering.diagnostics:
        raise DiagnosticsError(lowering.diagnostics)

    interface = Interface(
        name=top[: -len("Window")],
        structures=(Structure(roots=(root,)),),
        styles=(Style(bindings=tuple(lowering.bindings)),) if lowering.bindings else (),
        contents=(ContentSection(constants=tuple(lowering.constants)),) if lowering.constants else (),
        behaviors=(Behavior(rules=tuple(lowering.rules)),) if lowering.rules else (),
    )
    logger.info(f"Lowered '{model.title}' to {sum(1 for _ in root.walk())} generic part(s)")
    return UimlDocument(head=(MetaEntry(name="Purpose", content=model.title),), interfaces=(interface,))
