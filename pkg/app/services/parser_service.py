"""
UIML reader and canonical writer.

parse_uiml turns UTF-8 UIML text into a UimlDocument, collecting up to
`settings.max_diagnostics` diagnostics before giving up; serialize writes the
canonical form (2-space indent, fixed attribute order, trailing newline).
<peers> and <template> are kept as canonical XML strings and written back
unchanged.
"""
import copy
import logging
from typing import Dict, List, Optional, Tuple, Union

from lxml import etree

from app.config import settings
from app.core.errors import DiagnosticsError, SourceError
from app.schemas.diagnostic_schema import Diagnostic, error, has_errors, warning
from app.schemas.uiml_schema import (
    AddChild,
    Behavior,
    CallExternal,
    ClassSelector,
    Constant,
    ContentRef,
    ContentSection,
    DataEntry,
    EventDataEquals,
    EventOccurs,
    FireEvent,
    Interface,
    LiteralArg,
    LiteralValue,
    MetaEntry,
    Part,
    PartSelector,
    PropertyBinding,
    PropertyRef,
    Remove,
    Restructure,
    Rule,
    SetProperty,
    Structure,
    Style,
    UimlDocument,
)
from app.services.source_service import check_uiml_bytes, read_source

logger = logging.getLogger(__name__)

XML_PROLOG = '<?xml version="1.0" encoding="UTF-8"?>'

SourceMap = Dict[Tuple[str, str], int]


def _xml_parser() -> etree.XMLParser:
    # one parser per call: lxml parsers are not shareable across threads
    return etree.XMLParser(
        resolve_entities=False,
        no_network=True,
        load_dtd=False,
        remove_comments=True,
        remove_pis=True,
    )


def canonical_fragment(element: etree._Element) -> str:
    """Whitespace-normalized, 2-space indented text of an opaque section"""
    fragment = copy.deepcopy(element)
    fragment.tail = None
    for node in fragment.iter():
        if len(node) and node.text is not None and not node.text.strip():
            node.text = None
        if node is not fragment and node.tail is not None and not node.tail.strip():
            node.tail = None
    etree.indent(fragment, space="  ")
    return etree.tostring(fragment, encoding="unicode")


class _DocumentBuilder:
    """Walks the lxml tree, building models and collecting diagnostics"""

    def __init__(self, source_name: str):
        self.source_name = source_name
        self.diagnostics: List[Diagnostic] = []
        self.source_map: SourceMap = {}
        self._truncated = False

    # ── diagnostics ──────────────────────────────────────────────────────────

    def report(self, code: str, message: str, el: Optional[etree._Element] = None) -> None:
        if len(self.diagnostics) >= settings.max_diagnostics:
            if not self._truncated:
                self._truncated = True
                self.diagnostics.append(warning(
                    "UIML011", f"diagnostic limit of {settings.max_diagnostics} reached; parsing stopped reporting"))
            return
        line = el.sourceline if el is not None and el.sourceline else 0
        self.diagnostics.append(error(code, message, line, 1 if line else 0))

    def unknown(self, el: etree._Element, section: str) -> None:
        self.report("UIML010", f"unknown element <{el.tag}> in <{section}>", el)

    def attr(self, el: etree._Element, name: str, required: bool = True) -> Optional[str]:
        value = el.get(name)
        if value is None or value == "":
            if required:
                self.report("UIML003", f"<{el.tag}> is missing required attribute '{name}'", el)
            return None
        return value

    @staticmethod
    def elements(el: etree._Element) -> List[etree._Element]:
        return [child for child in el if isinstance(child.tag, str)]

    # ── document ─────────────────────────────────────────────────────────────

    def document(self, root: etree._Element) -> Optional[UimlDocument]:
        if root.tag != "uiml":
            self.report("UIML009", f"root element must be <uiml>, found <{root.tag}>", root)
            return None

        head: List[MetaEntry] = []
        interfaces: List[Interface] = []
        sections: Dict[str, str] = {}
        seen_head = False

        for child in self.elements(root):
            if child.tag == "head":
                if seen_head:
                    self.report("UIML008", "<head> may appear only once", child)
                    continue
                seen_head = True
                head = self.head(child)
            elif child.tag == "interface":
                interface = self.interface(child)
                if any(i.name == interface.name for i in interfaces):
                    self.report("UIML004", f"duplicate interface name '{interface.name}'", child)
                    continue
                interfaces.append(interface)
            elif child.tag in ("peers", "template"):
                if child.tag in sections:
                    self.report("UIML008", f"<{child.tag}> may appear only once", child)
                    continue
                sections[child.tag] = canonical_fragment(child)
            else:
                self.unknown(child, "uiml")

        return UimlDocument(
            head=tuple(head),
            interfaces=tuple(interfaces),
            preserved_peers=sections.get("peers", ""),
            preserved_templates=sections.get("template", ""),
            source_name=self.source_name,
        )

    def head(self, el: etree._Element) -> List[MetaEntry]:
        entries = []
        for child in self.elements(el):
            if child.tag != "meta":
                self.unknown(child, "head")
                continue
            name = self.attr(child, "name")
            if name is not None:
                entries.append(MetaEntry(name=name, content=child.get("content", "")))
        return entries

    def interface(self, el: etree._Element) -> Interface:
        name = el.get("name", "")
        structures, styles, contents, behaviors = [], [], [], []
        for child in self.elements(el):
            if child.tag == "structure":
                structures.append(self.structure(child, name))
            elif child.tag == "style":
                styles.append(self.style(child))
            elif child.tag == "content":
                contents.append(self.content(child))
            elif child.tag == "behavior":
                behaviors.append(self.behavior(child, name))
            else:
                self.unknown(child, "interface")
        return Interface(
            name=name,
            structures=tuple(structures),
            styles=tuple(styles),
            contents=tuple(contents),
            behaviors=tuple(behaviors),
        )

    # ── structure ────────────────────────────────────────────────────────────

    def structure(self, el: etree._Element, interface_name: str) -> Structure:
        names: Dict[str, int] = {}
        roots = []
        for child in self.elements(el):
            if child.tag != "part":
                self.unknown(child, "structure")
                continue
            part = self.part(child, names, interface_name)
            if part is not None:
                roots.append(part)
        return Structure(roots=tuple(roots))

    def part(self, el: etree._Element, names: Dict[str, int], interface_name: Optional[str]) -> Optional[Part]:
        name = self.attr(el, "name")
        widget_class = self.attr(el, "class")
        if name is None or widget_class is None:
            return None
        if name in names:
            self.report("UIML002", f"duplicate part name '{name}' (first defined on line {names[name]})", el)
            return None
        names[name] = el.sourceline or 0
        if interface_name is not None:
            self.source_map.setdefault((interface_name, name), el.sourceline or 0)
        children = []
        for child in self.elements(el):
            if child.tag != "part":
                self.unknown(child, "part")
                continue
            part = self.part(child, names, interface_name)
            if part is not None:
                children.append(part)
        return Part(name=name, widget_class=widget_class, children=tuple(children))

    # ── style / content ──────────────────────────────────────────────────────

    def style(self, el: etree._Element) -> Style:
        bindings = []
        for child in self.elements(el):
            if child.tag != "property":
                self.unknown(child, "style")
                continue
            binding = self.binding(child)
            if binding is not None:
                bindings.append(binding)
        return Style(bindings=tuple(bindings))

    def binding(self, el: etree._Element) -> Optional[PropertyBinding]:
        part_name, class_name = el.get("part-name"), el.get("class-name")
        if part_name and class_name:
            self.report("UIML007", "<property> takes either 'part-name' or 'class-name', not both", el)
            return None
        if not part_name and not class_name:
            self.report("UIML003", "<property> is missing required attribute 'part-name' or 'class-name'", el)
            return None
        property_name = self.attr(el, "name")
        if property_name is None:
            return None
        selector = PartSelector(name=part_name) if part_name else ClassSelector(name=class_name)
        value = self.value(el)
        if value is None:
            return None
        return PropertyBinding(selector=selector, property_name=property_name, value=value)

    def value(self, el: etree._Element) -> Optional[Union[LiteralValue, ContentRef]]:
        children = self.elements(el)
        if not children:
            return LiteralValue(text=el.text or "")
        ref = children[0]
        if ref.tag != "reference" or len(children) > 1:
            for child in children:
                if child.tag != "reference" or child is not ref:
                    self.unknown(child, "property")
            return None
        if (el.text or "").strip() or (ref.tail or "").strip():
            self.report("UIML007", "<property> value mixes literal text with a <reference>", el)
            return None
        constant = self.attr(ref, "constant-name")
        return ContentRef(constant=constant) if constant else None

    def content(self, el: etree._Element) -> ContentSection:
        found: List[Constant] = []
        for child in self.elements(el):
            if child.tag != "constant":
                self.unknown(child, "content")
                continue
            name = self.attr(child, "name")
            if name is None:
                continue
            if any(c.name == name for c in found):
                self.report("UIML005", f"duplicate constant name '{name}'", child)
                continue
            for nested in self.elements(child):
                self.unknown(nested, "constant")
            found.append(Constant(name=name, value=child.text or ""))
        return ContentSection(constants=tuple(found))

    # ── behavior ─────────────────────────────────────────────────────────────

    def behavior(self, el: etree._Element, interface_name: str) -> Behavior:
        rules = []
        for child in self.elements(el):
            if child.tag != "rule":
                self.unknown(child, "behavior")
                continue
            rule = self.rule(child)
            if rule is not None:
                rules.append(rule)
        return Behavior(rules=tuple(rules))

    def rule(self, el: etree._Element) -> Optional[Rule]:
        condition_el = action_el = None
        for child in self.elements(el):
            if child.tag == "condition" and condition_el is None:
                condition_el = child
            elif child.tag == "action" and action_el is None:
                action_el = child
            else:
                self.unknown(child, "rule")
        if condition_el is None or action_el is None:
            self.report("UIML006", "<rule> needs one <condition> and one <action>", el)
            return None
        condition = self.condition(condition_el)
        actions = self.actions(action_el)
        if condition is None:
            return None
        if not actions:
            self.report("UIML006", "<action> must contain at least one action", action_el)
            return None
        return Rule(condition=condition, actions=tuple(actions))

    def condition(self, el: etree._Element):
        children = self.elements(el)
        event_el = next((c for c in children if c.tag == "event"), None)
        op_el = next((c for c in children if c.tag == "op"), None)
        for child in children:
            if child is not event_el and child is not op_el:
                self.unknown(child, "condition")
        if event_el is None:
            self.report("UIML006", "<condition> needs an <event>", el)
            return None
        event_class = self.attr(event_el, "class")
        if event_class is None:
            return None
        source_part = event_el.get("part-name") or None
        if op_el is None:
            return EventOccurs(source_part=source_part, event_class=event_class)

        if op_el.get("name") != "equal":
            self.report("UIML007", f"unsupported condition operator '{op_el.get('name', '')}', expected 'equal'", op_el)
            return None
        data_el = constant_el = None
        for child in self.elements(op_el):
            if child.tag == "data" and data_el is None:
                data_el = child
            elif child.tag == "constant" and constant_el is None:
                constant_el = child
            else:
                self.unknown(child, "op")
        if data_el is None or constant_el is None:
            self.report("UIML006", "<op name=\"equal\"> needs a <data> and a <constant>", op_el)
            return None
        key = self.attr(data_el, "key")
        if key is None:
            return None
        return EventDataEquals(
            source_part=source_part, event_class=event_class, data_key=key, expected=constant_el.text or "")

    def actions(self, el: etree._Element) -> list:
        actions = []
        for child in self.elements(el):
            handler = {
                "property": self.set_property,
                "call": self.call,
                "event": self.fire_event,
                "restructure": self.restructure,
            }.get(child.tag)
            if handler is None:
                self.unknown(child, "action")
                continue
            action = handler(child)
            if action is not None:
                actions.append(action)
        return actions

    def set_property(self, el: etree._Element) -> Optional[SetProperty]:
        part, name = self.attr(el, "part-name"), self.attr(el, "name")
        for child in self.elements(el):
            self.unknown(child, "property")
        if part is None or name is None:
            return None
        return SetProperty(part=part, property_name=name, value=el.text or "")

    def call(self, el: etree._Element) -> Optional[CallExternal]:
        function = self.attr(el, "name")
        args = []
        for child in self.elements(el):
            if child.tag != "param":
                self.unknown(child, "call")
                continue
            nested = self.elements(child)
            if not nested:
                args.append(LiteralArg(text=child.text or ""))
                continue
            ref = nested[0]
            for extra in nested[1:]:
                self.unknown(extra, "param")
            if ref.tag != "property":
                self.unknown(ref, "param")
                continue
            part, name = self.attr(ref, "part-name"), self.attr(ref, "name")
            if part is not None and name is not None:
                args.append(PropertyRef(part=part, property_name=name))
        if function is None:
            return None
        return CallExternal(function=function, args=tuple(args))

    def fire_event(self, el: etree._Element) -> Optional[FireEvent]:
        event_class, source = self.attr(el, "class"), self.attr(el, "part-name")
        data = []
        for child in self.elements(el):
            if child.tag != "data":
                self.unknown(child, "event")
                continue
            key = self.attr(child, "key")
            if key is not None:
                data.append(DataEntry(key=key, value=child.text or ""))
        if event_class is None or source is None:
            return None
        return FireEvent(event_class=event_class, source_part=source, data=tuple(data))

    def restructure(self, el: etree._Element) -> Optional[Restructure]:
        op = el.get("op")
        target = self.attr(el, "part-name")
        children = self.elements(el)
        if op == "remove":
            for child in children:
                self.unknown(child, "restructure")
            return Restructure(op=Remove(part=target)) if target else None
        if op != "add":
            self.report("UIML007", f"unknown restructure op '{op or ''}', expected 'add' or 'remove'", el)
            return None
        parts = [c for c in children if c.tag == "part"]
        for child in children:
            if child.tag != "part":
                self.unknown(child, "restructure")
        if len(parts) != 1:
            self.report("UIML006", "<restructure op=\"add\"> needs exactly one <part>", el)
            return None
        subtree = self.part(parts[0], {}, None)
        if subtree is None or target is None:
            return None
        return Restructure(op=AddChild(parent=target, subtree=subtree))


def _syntax_diagnostics(exc: etree.XMLSyntaxError) -> List[Diagnostic]:
    diagnostics = []
    for entry in exc.error_log:
        if entry.level >= etree.ErrorLevels.ERROR:
            diagnostics.append(error("UIML001", entry.message, max(entry.line, 1), max(entry.column, 1)))
        if len(diagnostics) >= settings.max_diagnostics:
            break
    if not diagnostics:
        line, column = exc.position
        diagnostics.append(error("UIML001", exc.msg or str(exc), max(line, 1), max(column, 1)))
    return diagnostics


def _declares_entities(root: etree._Element) -> bool:
    dtd = root.getroottree().docinfo.internalDTD
    return dtd is not None and any(True for _ in dtd.iterentities())


def parse_uiml_located(data: Union[bytes, str], source_name: str = "") -> Tuple[UimlDocument, SourceMap]:
    """parse_uiml that also returns the source line of every structure part"""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        check_uiml_bytes(data, source_name or "<input>")
    except SourceError as e:
        raise DiagnosticsError([error("UIML009", str(e), 1, 1)])

    try:
        root = etree.fromstring(data, _xml_parser())
    except etree.XMLSyntaxError as e:
        diagnostics = _syntax_diagnostics(e)
        logger.info(f"{source_name or '<input>'}: malformed XML ({len(diagnostics)} diagnostic(s))")
        raise DiagnosticsError(diagnostics)

    if _declares_entities(root):
        message = f"{source_name or '<input>'}: entity declarations are not supported"
        raise DiagnosticsError([error("UIML009", message, 1, 1)])

    builder = _DocumentBuilder(source_name)
    doc = builder.document(root)
    if doc is None or has_errors(builder.diagnostics):
        raise DiagnosticsError(builder.diagnostics)
    logger.info(f"Parsed {source_name or '<input>'}: {len(doc.interfaces)} interface(s)")
    return doc, builder.source_map


def parse_uiml(data: Union[bytes, str], source_name: str = "") -> UimlDocument:
    doc, _ = parse_uiml_located(data, source_name)
    return doc


def parse_uiml_file(path: str) -> Tuple[UimlDocument, SourceMap]:
    return parse_uiml_located(read_source(path), path)


# ── Canonical writer ────────────────────────────────────────────────────────

def _sub(parent: etree._Element, tag: str, attrs: Tuple[Tuple[str, Optional[str]], ...] = (), text: Optional[str] = None):
    el = etree.SubElement(parent, tag)
    for name, value in attrs:
        if value is not None:
            el.set(name, value)
    if text:
        el.text = text
    return el


def _write_part(parent: etree._Element, part: Part) -> None:
    el = _sub(parent, "part", (("name", part.name), ("class", part.widget_class)))
    for child in part.children:
        _write_part(el, child)


def _write_binding(parent: etree._Element, binding: PropertyBinding) -> None:
    selector = binding.selector
    key = "part-name" if isinstance(selector, PartSelector) else "class-name"
    el = _sub(parent, "property", ((key, selector.name), ("name", binding.property_name)))
    if isinstance(binding.value, ContentRef):
        _sub(el, "reference", (("constant-name", binding.value.constant),))
    else:
        el.text = binding.value.text or None


def _write_action(parent: etree._Element, action) -> None:
    if isinstance(action, SetProperty):
        _sub(parent, "property", (("part-name", action.part), ("name", action.property_name)), action.value)
    elif isinstance(action, CallExternal):
        el = _sub(parent, "call", (("name", action.function),))
        for arg in action.args:
            param = _sub(el, "param")
            if isinstance(arg, PropertyRef):
                _sub(param, "property", (("part-name", arg.part), ("name", arg.property_name)))
            else:
                param.text = arg.text or None
    elif isinstance(action, FireEvent):
        el = _sub(parent, "event", (("class", action.event_class), ("part-name", action.source_part)))
        for entry in action.data:
            _sub(el, "data", (("key", entry.key),), entry.value)
    elif isinstance(action, Restructure):
        op = action.op
        if isinstance(op, AddChild):
            el = _sub(parent, "restructure", (("op", "add"), ("part-name", op.parent)))
            _write_part(el, op.subtree)
        else:
            _sub(parent, "restructure", (("op", "remove"), ("part-name", op.part)))


def _write_rule(parent: etree._Element, rule: Rule) -> None:
    el = _sub(parent, "rule")
    condition = _sub(el, "condition")
    cond = rule.condition
    _sub(condition, "event", (("class", cond.event_class), ("part-name", cond.source_part)))
    if isinstance(cond, EventDataEquals):
        op = _sub(condition, "op", (("name", "equal"),))
        _sub(op, "data", (("key", cond.data_key),))
        _sub(op, "constant", text=cond.expected)
    actions = _sub(el, "action")
    for action in rule.actions:
        _write_action(actions, action)


def _write_interface(parent: etree._Element, interface: Interface) -> None:
    el = _sub(parent, "interface", (("name", interface.name or None),))
    for structure in interface.structures:
        s = _sub(el, "structure")
        for root in structure.roots:
            _write_part(s, root)
    for style in interface.styles:
        s = _sub(el, "style")
        for binding in style.bindings:
            _write_binding(s, binding)
    for section in interface.contents:
        s = _sub(el, "content")
        for constant in section.constants:
            _sub(s, "constant", (("name", constant.name),), constant.value)
    for behavior in interface.behaviors:
        s = _sub(el, "behavior")
        for rule in behavior.rules:
            _write_rule(s, rule)


def to_element(doc: UimlDocument) -> etree._Element:
    root = etree.Element("uiml")
    if doc.head:
        head = _sub(root, "head")
        for entry in doc.head:
            _sub(head, "meta", (("name", entry.name), ("content", entry.content)))
    for interface in doc.interfaces:
        _write_interface(root, interface)
    for fragment in (doc.preserved_peers, doc.preserved_templates):
        if fragment:
            root.append(etree.fromstring(fragment, _xml_parser()))
    return root


def serialize(doc: UimlDocument) -> str:
    root = to_element(doc)
    etree.indent(root, space="  ")
    return XML_PROLOG + "\n" + etree.tostring(root, encoding="unicode") + "\n"
