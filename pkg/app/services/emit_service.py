"""
Markup emitters for platform UIML: HTML, a WML deck, and a VoiceXML-shaped
dialog. Each emitter expects a document that validates against its family's
vocabulary and produces well-formed, deterministic text.
"""
import logging
from typing import Dict, List, Optional

from lxml import etree

from app.config import settings
from app.core.errors import UnknownClass
from app.schemas.emit_schema import EmitOptions
from app.schemas.uiml_schema import Interface, Part, UimlDocument
from app.schemas.vocabulary_schema import FamilyId
from app.services.document_service import bound_properties, find_in_structure, get_interface, iter_parts
from app.services.vocabulary_service import family_of

logger = logging.getLogger(__name__)

XML_PROLOG = '<?xml version="1.0" encoding="UTF-8"?>'
HTML_PROLOG = "<!DOCTYPE html>"
WML_DOCTYPE = '<!DOCTYPE wml PUBLIC "-//WAPFORUM//DTD WML 1.2//EN" "http://www.wapforum.org/DTD/wml12.dtd">'

EXTENSIONS = {
    FamilyId.HTML_DESKTOP: "html",
    FamilyId.WML_PHONE: "wml",
    FamilyId.VOICE: "vxml.txt",
}


def _sub(parent, tag: str, text: Optional[str] = None, **attrs) -> etree._Element:
    el = etree.SubElement(parent, tag)
    for name, value in attrs.items():
        if value is not None:
            el.set(name.rstrip("_").replace("_", "-"), value)
    if text is not None:
        el.text = text
    return el


def _grammar_alternative(choice: str) -> str:
    return choice.replace("\\", "\\\\").replace("|", "\\|")


class _Emitter:
    """Shared plumbing: property lookup, visibility, titles, serialization"""

    family: FamilyId
    containers: frozenset = frozenset()

    def __init__(self, doc: UimlDocument, opts: EmitOptions):
        self.doc = doc
        self.opts = opts
        self.interface: Interface = get_interface(doc, opts.interface_name) if doc.interfaces else Interface()
        self._props: Dict[str, Dict[str, str]] = {}

    def props(self, part: Part) -> Dict[str, str]:
        if part.name not in self._props:
            resolved = bound_properties(self.interface, part)
            self._props[part.name] = {k: v for k, v in resolved.items() if v is not None}
        return self._props[part.name]

    def prop(self, part: Part, name: str, default: str = "") -> str:
        return self.props(part).get(name, default)

    def visible(self, part: Part) -> bool:
        return self.prop(part, "visible", "true") != "false"

    def enabled(self, part: Part) -> bool:
        return self.prop(part, "enabled", "true") != "false"

    def is_container(self, part: Part) -> bool:
        return part.widget_class in self.containers

    def title(self) -> str:
        if self.opts.title_source:
            part = find_in_structure(self.interface.structure, self.opts.title_source)
            if part is not None:
                return self.prop(part, "text")
        return self.doc.meta("Purpose") or self.interface.name

    def unknown(self, part: Part) -> UnknownClass:
        return UnknownClass(part.widget_class, f"{self.family.value} emitter")

    def finish(self, root: etree._Element, prolog: List[str]) -> str:
        if self.opts.indent:
            etree.indent(root, space=" " * self.opts.indent)
        lines = prolog if self.opts.include_prolog else []
        return "\n".join(lines + [etree.tostring(root, encoding="unicode")]) + "\n"

    def emit(self) -> str:
        raise NotImplementedError


class HtmlEmitter(_Emitter):
    family = FamilyId.HTML_DESKTOP
    containers = frozenset({"page", "div", "form", "fieldset"})
    BUTTONS = {"button": "button", "submit": "submit", "reset": "reset"}

    def emit(self) -> str:
        html = etree.Element("html")
        head = _sub(html, "head")
        _sub(head, "title", self.title())
        body = _sub(html, "body", "")
        for root in self.interface.structure.roots:
            if root.widget_class == "page":
                self.children(body, root.children)
            else:
                self.children(body, (root,))
        return self.finish(html, [HTML_PROLOG])

    def children(self, parent: etree._Element, parts) -> None:
        previous_leaf = False
        for part in parts:
            if not self.visible(part):
                continue
            leaf = not self.is_container(part)
            if leaf and previous_leaf:
                _sub(parent, "br")
            self.part(parent, part)
            previous_leaf = leaf

    def part(self, parent: etree._Element, part: Part) -> None:
        cls = part.widget_class
        disabled = None if self.enabled(part) else "disabled"
        if self.is_container(part):
            tag = "div" if cls == "page" else cls
            el = _sub(parent, tag, "", id=part.name)
            self.children(el, part.children)
        elif cls == "label":
            _sub(parent, "label", self.prop(part, "text"))
        elif cls == "input-text":
            _sub(parent, "input", type="text", name=part.name,
                 value=self.props(part).get("value"), disabled=disabled)
        elif cls == "select":
            el = _sub(parent, "select", "", name=part.name, disabled=disabled)
            selected = self.props(part).get("selected")
            for item in self.prop(part, "items").split("\n"):
                if item:
                    _sub(el, "option", item, selected="selected" if item == selected else None)
        elif cls in self.BUTTONS:
            _sub(parent, "input", type=self.BUTTONS[cls], name=part.name,
                 value=self.prop(part, "value"), disabled=disabled)
        else:
            raise self.unknown(part)


class WmlEmitter(_Emitter):
    family = FamilyId.WML_PHONE
    containers = frozenset({"deck", "card"})
    INTERACTIVE = frozenset({"input", "select", "do-action"})

    def emit(self) -> str:
        self.card_ids = {part.name for part in iter_parts(self.interface.structure)}
        wml = etree.Element("wml")
        wml.text = ""
        for root in self.interface.structure.roots:
            if not self.visible(root):
                continue
            if root.widget_class == "deck":
                self.deck(wml, root)
            elif root.widget_class == "card":
                self.card(wml, root.name, self.card_title(root), self.leaves(root))
            else:
                self.card(wml, root.name, self.title(), [root])
        return self.finish(wml, [XML_PROLOG, WML_DOCTYPE])

    def card_title(self, part: Part) -> str:
        return self.prop(part, "text") or self.title()

    def leaves(self, container: Part) -> List[Part]:
        """Visible leaves of a card; nested cards are flattened in place"""
        found = []
        for child in container.children:
            if not self.visible(child):
                continue
            if self.is_container(child):
                found.extend(self.leaves(child))
            else:
                found.append(child)
        return found

    def deck(self, wml: etree._Element, deck: Part) -> None:
        loose: List[Part] = []
        slots: List = []
        for child in deck.children:
            if not self.visible(child):
                continue
            if self.is_container(child):
                slots.append(child)
            else:
                if not loose:
                    slots.append(None)
                loose.append(child)
        for slot in slots:
            if slot is None:
                self.card(wml, deck.name, self.card_title(deck), loose)
            else:
                self.card(wml, slot.name, self.card_title(slot), self.leaves(slot))

    def chunks(self, leaves: List[Part]) -> List[List[Part]]:
        threshold = settings.wml_card_threshold
        chunks: List[List[Part]] = [[]]
        pending: List[Part] = []
        count = 0
        for leaf in leaves:
            if leaf.widget_class not in self.INTERACTIVE:
                pending.append(leaf)
                continue
            if count == threshold:
                chunks.append([])
                count = 0
            chunks[-1].extend(pending)
            chunks[-1].append(leaf)
            pending = []
            count += 1
        chunks[-1].extend(pending)
        return chunks

    def overflow_id(self, card_id: str) -> str:
        """`<card>-2`, `<card>-3`, ... skipping ids already taken by parts"""
        n = 2
        while f"{card_id}-{n}" in self.card_ids:
            n += 1
        self.card_ids.add(f"{card_id}-{n}")
        return f"{card_id}-{n}"

    def card(self, wml: etree._Element, card_id: str, title: str, leaves: List[Part]) -> None:
        chunks = self.chunks(leaves)
        ids = [card_id] + [self.overflow_id(card_id) for _ in chunks[1:]]
        for index, chunk in enumerate(chunks):
            card = _sub(wml, "card", "", id=ids[index], title=title)
            for leaf in chunk:
                self.leaf(card, leaf)
            if index + 1 < len(chunks):
                link = _sub(card, "do", type="accept", label="Next")
                _sub(link, "go", href=f"#{ids[index + 1]}")

    def leaf(self, card: etree._Element, part: Part) -> None:
        cls = part.widget_class
        if cls == "text":
            _sub(card, "p", self.prop(part, "text"))
        elif cls == "input":
            p = _sub(card, "p")
            _sub(p, "input", name=part.name, type="text", value=self.props(part).get("value"))
        elif cls == "select":
            p = _sub(card, "p")
            el = _sub(p, "select", "", name=part.name)
            for item in self.prop(part, "items").split("\n"):
                if item:
                    _sub(el, "option", item, value=item)
        elif cls == "do-action":
            action = _sub(card, "do", type="options", name=part.name, label=self.prop(part, "label") or part.name)
            _sub(action, "noop")
        else:
            raise self.unknown(part)


class VoiceEmitter(_Emitter):
    family = FamilyId.VOICE
    containers = frozenset({"dialog", "voice-form"})
    FIELDS = frozenset({"field-spoken", "field-choice"})

    def emit(self) -> str:
        vxml = etree.Element("vxml", version="2.0")
        vxml.text = ""
        for root in self.interface.structure.roots:
            if not self.visible(root):
                continue
            form = _sub(vxml, "form", "", id=root.name)
            self.children(form, root.children if self.is_container(root) else (root,))
        return self.finish(vxml, [XML_PROLOG])

    def claims(self, siblings: List[Part]) -> Dict[str, Part]:
        """field name -> the nearest preceding unclaimed prompt sibling"""
        claimed: Dict[str, Part] = {}
        taken = set()
        for index, part in enumerate(siblings):
            if part.widget_class not in self.FIELDS:
                continue
            for previous in reversed(siblings[:index]):
                if previous.widget_class != "prompt":
                    break
                if previous.name not in taken:
                    claimed[part.name] = previous
                    taken.add(previous.name)
                    break
        return claimed

    def children(self, form: etree._Element, parts) -> None:
        visible = [p for p in parts if self.visible(p)]
        claims = self.claims(visible)
        consumed = {p.name for p in claims.values()}
        for part in visible:
            if self.is_container(part):
                self.children(form, part.children)
            elif part.widget_class == "prompt":
                if part.name not in consumed:
                    block = _sub(form, "block")
                    _sub(block, "prompt", self.prop(part, "text"))
            elif part.widget_class in self.FIELDS:
                prompt = claims.get(part.name)
                text = self.prop(prompt, "text") if prompt else self.prop(part, "text", part.name)
                field = _sub(form, "field", name=part.name)
                _sub(field, "prompt", text)
                if part.widget_class == "field-choice":
                    choices = [c for c in self.prop(part, "choices").split("\n") if c]
                    _sub(field, "grammar", "|".join(_grammar_alternative(c) for c in choices))
            elif part.widget_class == "confirm-action":
                block = _sub(form, "block", name=part.name, type="confirm")
                _sub(block, "prompt", self.prop(part, "text", part.name))
            else:
                raise self.unknown(part)


_EMITTERS = {
    FamilyId.HTML_DESKTOP: HtmlEmitter,
    FamilyId.WML_PHONE: WmlEmitter,
    FamilyId.VOICE: VoiceEmitter,
}


def emit(doc: UimlDocument, family, opts: Optional[EmitOptions] = None) -> str:
    family = family_of(family)
    text = _EMITTERS[family](doc, opts or EmitOptions()).emit()
    logger.info(f"Emitted {len(text)} characters of {family.value} markup for {doc.source_name or '<document>'}")
    return text


def emit_html(doc: UimlDocument, opts: Optional[EmitOptions] = None) -> str:
    return emit(doc, FamilyId.HTML_DESKTOP, opts)


def emit_wml(doc: UimlDocument, opts: Optional[EmitOptions] = None) -> str:
    return emit(doc, FamilyId.WML_PHONE, opts)


def emit_voice(doc: UimlDocument, opts: Optional[EmitOptions] = None) -> str:
    return emit(doc, FamilyId.VOICE, opts)
