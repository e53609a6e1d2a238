"""Queries over UimlDocument: part lookup, property cascade, counting"""
import logging
from typing import Dict, Iterator, Optional

from app.core.errors import DanglingContentRef, UnknownInterface, UnknownPart
from app.schemas.uiml_schema import (
    HINT_PREFIX,
    ClassSelector,
    ContentRef,
    Interface,
    Part,
    PartSelector,
    PropertyBinding,
    Structure,
    UimlDocument,
)

logger = logging.getLogger(__name__)


def get_interface(doc: UimlDocument, interface_name: Optional[str] = None) -> Interface:
    """Named interface, or the first one when no name is given"""
    if interface_name is None:
        if not doc.interfaces:
            raise UnknownInterface("<first>")
        return doc.interfaces[0]
    for interface in doc.interfaces:
        if interface.name == interface_name:
            return interface
    raise UnknownInterface(interface_name)


def iter_parts(structure: Structure) -> Iterator[Part]:
    return structure.walk()


def find_in_structure(structure: Structure, part_name: str) -> Optional[Part]:
    for part in structure.walk():
        if part.name == part_name:
            return part
    return None


def find_part(doc: UimlDocument, interface_name: str, part_name: str) -> Optional[Part]:
    interface = get_interface(doc, interface_name)
    return find_in_structure(interface.structure, part_name)


def count_parts(structure: Structure) -> int:
    return sum(1 for _ in structure.walk())


def constants(interface: Interface) -> Dict[str, str]:
    table: Dict[str, str] = {}
    for section in interface.contents:
        for constant in section.constants:
            table[constant.name] = constant.value
    return table


def binding_value(interface: Interface, binding: PropertyBinding, table: Optional[Dict[str, str]] = None) -> str:
    value = binding.value
    if isinstance(value, ContentRef):
        table = constants(interface) if table is None else table
        if value.constant not in table:
            raise DanglingContentRef(value.constant)
        return table[value.constant]
    return value.text


def cascade(interface: Interface, part_name: str, widget_class: str, property_name: str) -> Optional[str]:
    """
    Part selector beats class selector; within one selector kind the binding
    latest in document order wins.
    """
    by_part: Optional[PropertyBinding] = None
    by_class: Optional[PropertyBinding] = None
    for binding in interface.bindings():
        if binding.property_name != property_name:
            continue
        selector = binding.selector
        if isinstance(selector, PartSelector) and selector.name == part_name:
            by_part = binding
        elif isinstance(selector, ClassSelector) and selector.name == widget_class:
            by_class = binding
    chosen = by_part or by_class
    if chosen is None:
        return None
    return binding_value(interface, chosen)


def resolve_property(doc: UimlDocument, interface_name: Optional[str], part_name: str, property_name: str) -> Optional[str]:
    interface = get_interface(doc, interface_name)
    part = find_in_structure(interface.structure, part_name)
    if part is None:
        raise UnknownPart(part_name)
    return cascade(interface, part.name, part.widget_class, property_name)


def bound_properties(interface: Interface, part: Part) -> Dict[str, str]:
    """Every property declared for a part (directly or via its class), resolved"""
    names = []
    for binding in interface.bindings():
        selector = binding.selector
        applies = (
            (isinstance(selector, PartSelector) and selector.name == part.name)
            or (isinstance(selector, ClassSelector) and selector.name == part.widget_class)
        )
        if binding.property_name.startswith(HINT_PREFIX):
            continue
        if applies and binding.property_name not in names:
            names.append(binding.property_name)
    return {name: cascade(interface, part.name, part.widget_class, name) for name in names}
