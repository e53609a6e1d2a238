import os

from lxml import etree

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


SAMPLE_CLASSES = [
    "GTopContainer", "GArea",
    "GLabel",
    "GLabel", "GText",
    "GLabel", "GText",
    "GLabel", "GText",
    "GLabel", "GText",
    "GLabel", "GList",
    "GLabel", "GText",
    "GButton", "GButton", "GButton",
]


def assert_well_formed(text: str) -> etree._Element:
    """Re-parse emitter output; any unbalanced tag raises XMLSyntaxError"""
    parser = etree.XMLParser(resolve_entities=False, no_network=True, load_dtd=False)
    return etree.fromstring(text.encode("utf-8"), parser)


def shape(part):
    """(name, [child shapes]) ignoring classes"""
    return part.name, [shape(child) for child in part.children]
