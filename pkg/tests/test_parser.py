import pytest

from app.core.errors import DiagnosticsError, SourceError
from app.schemas.uiml_schema import (
    CallExternal,
    ContentRef,
    EventDataEquals,
    LiteralValue,
    PartSelector,
    PropertyRef,
    Restructure,
    SetProperty,
    UimlDocument,
)
from app.services.parser_service import parse_uiml, parse_uiml_file, parse_uiml_located, serialize
from app.services.source_service import read_source
from tests.generators import random_document, seeded
from tests.helpers import SAMPLE_CLASSES, data_path

FIGURE_ONE = b"""<?xml version="1.0"?>
<uiml>
  <head>...</head>
  <interface>...</interface>
  <peers>...</peers>
  <template>...</template>
</uiml>
"""


def codes(exc_info):
    return [d.code for d in exc_info.value.diagnostics]


class TestSampleDocument:
    def test_golden_structure(self, sample_doc):
        structure = sample_doc.interfaces[0].structure
        (root,) = structure.roots
        assert (root.name, root.widget_class) == ("RequestWindow", "GTopContainer")
        (block,) = root.children
        assert (block.name, block.widget_class) == ("EBlock1", "GArea")
        assert len(block.children) == 16
        assert [c.name for c in block.children][:3] == ["TitleLabel", "FirstName", "FirstNameField"]
        assert [c.name for c in block.children][-3:] == ["OKBtn", "CancelBtn", "ResetBtn"]
        assert [p.widget_class for p in structure.walk()] == SAMPLE_CLASSES

    def test_style_content_and_behavior(self, sample_doc):
        interface = sample_doc.interfaces[0]
        bindings = list(interface.bindings())
        assert bindings[0].value == ContentRef(constant="TitleText")
        items = next(b for b in bindings if b.property_name == "items")
        assert items.value == LiteralValue(text="VA\nNY")
        rules = list(interface.rules())
        call = rules[0].actions[0]
        assert isinstance(call, CallExternal)
        assert call.args == (PropertyRef(part="FirstNameField", property_name="value"),)
        reset = rules[1].actions[0]
        assert isinstance(reset, SetProperty) and reset.value == ""

    def test_meta_and_source_name(self, sample_doc, sample_path):
        assert [m.name for m in sample_doc.head] == ["Purpose", "Author"]
        assert sample_doc.meta("Purpose") == "Data Collection Form"
        assert sample_doc.source_name == sample_path

    def test_source_map_lines(self, sample_path):
        _, source_map = parse_uiml_file(sample_path)
        assert source_map[("DataCollectionForm", "RequestWindow")] == 9
        assert source_map[("DataCollectionForm", "ResetBtn")] == 26


class TestSkeleton:
    def test_figure_one_skeleton(self):
        doc = parse_uiml(FIGURE_ONE)
        assert len(doc.interfaces) == 1
        assert doc.interfaces[0].name == ""
        assert doc.interfaces[0].structures == ()
        assert doc.preserved_peers == "<peers>...</peers>"
        assert doc.preserved_templates == "<template>...</template>"

    def test_empty_uiml(self):
        doc = parse_uiml(b"<uiml/>")
        assert doc == UimlDocument()
        assert serialize(doc) == '<?xml version="1.0" encoding="UTF-8"?>\n<uiml/>\n'

    def test_peers_are_preserved_verbatim(self):
        text = b'<uiml><peers><presentation base="Java_1.3"><d-class name="GButton"/></presentation></peers></uiml>'
        doc = parse_uiml(text)
        again = parse_uiml(serialize(doc))
        assert again.preserved_peers == doc.preserved_peers
        assert serialize(again) == serialize(doc)


class TestMalformedInput:
    def test_truncated_document(self):
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(b"<uiml><interface>")
        diagnostics = exc_info.value.diagnostics
        assert diagnostics[0].code == "UIML001"
        assert diagnostics[0].line == 1

    def test_wrong_root(self):
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(b"<html/>")
        assert codes(exc_info) == ["UIML009"]

    def test_entity_declaration_rejected(self):
        text = b'<!DOCTYPE uiml [<!ENTITY x "boom">]><uiml/>'
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(text)
        assert codes(exc_info) == ["UIML009"]

    def test_entity_text_outside_a_dtd_is_accepted(self):
        doc = parse_uiml(b"""<!DOCTYPE uiml>
<uiml>
  <!-- an <!ENTITY x "y"> in a comment declares nothing -->
  <interface name="e">
    <content><constant name="c"><![CDATA[<!ENTITY x "y">]]></constant></content>
  </interface>
</uiml>""")
        assert doc.interfaces[0].contents[0].constants[0].value == '<!ENTITY x "y">'

    @pytest.mark.parametrize("value", [
        b'abc<reference constant-name="c"/>',
        b'<reference constant-name="c"/>abc',
    ])
    def test_reference_mixed_with_text(self, value):
        text = (b'<uiml><interface><content><constant name="c">x</constant></content>'
                b'<style><property part-name="P" name="text">' + value + b'</property></style></interface></uiml>')
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(text)
        assert codes(exc_info) == ["UIML007"]

    def test_duplicate_part_reports_line(self):
        text = b"""<uiml>
  <interface name="a">
    <structure>
      <part name="X" class="GArea">
        <part name="X" class="GLabel"/>
      </part>
    </structure>
  </interface>
</uiml>"""
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(text)
        (diagnostic,) = exc_info.value.diagnostics
        assert diagnostic.code == "UIML002"
        assert diagnostic.line == 5

    @pytest.mark.parametrize("body,code", [
        (b'<interface><structure><part class="GLabel"/></structure></interface>', "UIML003"),
        (b'<interface name="a"/><interface name="a"/>', "UIML004"),
        (b'<interface><content><constant name="c"/><constant name="c"/></content></interface>', "UIML005"),
        (b'<interface><behavior><rule><action><call name="f"/></action></rule></behavior></interface>', "UIML006"),
        (b'<interface><behavior><rule><condition><event class="E"/></condition>'
         b'<action><restructure op="swap" part-name="X"/></action></rule></behavior></interface>', "UIML007"),
        (b"<head/><head/>", "UIML008"),
        (b"<interface><layout/></interface>", "UIML010"),
    ])
    def test_structural_errors(self, body, code):
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(b"<uiml>" + body + b"</uiml>")
        assert code in codes(exc_info)

    def test_diagnostics_are_capped(self, override_settings):
        override_settings(max_diagnostics=3)
        body = b"".join(b"<bogus%d/>" % i for i in range(10))
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_uiml(b"<uiml>" + body + b"</uiml>")
        assert codes(exc_info) == ["UIML010"] * 3 + ["UIML011"]

    def test_source_checks(self, tmp_path):
        wrong = tmp_path / "form.txt"
        wrong.write_text("<uiml/>")
        with pytest.raises(SourceError):
            read_source(str(wrong))
        with pytest.raises(SourceError):
            read_source(str(tmp_path / "missing.uiml"))
        latin = tmp_path / "latin.uiml"
        latin.write_bytes(b"<uiml><head><meta name='x' content='\xe9'/></head></uiml>")
        with pytest.raises(SourceError):
            read_source(str(latin))


class TestRoundTrip:
    def test_sample_round_trip(self, sample_doc):
        text = serialize(sample_doc)
        again = parse_uiml(text, sample_doc.source_name)
        assert again == sample_doc
        assert serialize(again) == text

    def test_condition_with_data_and_restructure(self):
        text = b"""<uiml><interface name="i">
  <structure><part name="W" class="GTopContainer"/></structure>
  <behavior><rule>
    <condition>
      <event class="GChangedEvent" part-name="F"/>
      <op name="equal"><data key="value"/><constant>yes</constant></op>
    </condition>
    <action>
      <restructure op="add" part-name="W"><part name="N" class="GLabel"/></restructure>
      <restructure op="remove" part-name="N"/>
    </action>
  </rule></behavior>
</interface></uiml>"""
        doc = parse_uiml(text)
        rule = next(doc.interfaces[0].rules())
        assert rule.condition == EventDataEquals(
            source_part="F", event_class="GChangedEvent", data_key="value", expected="yes")
        assert all(isinstance(a, Restructure) for a in rule.actions)
        assert parse_uiml(serialize(doc)) == doc

    def test_attribute_order_is_fixed(self, sample_doc):
        text = serialize(sample_doc)
        assert '<part name="EBlock1" class="GArea">' in text
        assert '<property part-name="OKBtn" name="text">OK</property>' in text
        assert text.endswith("</uiml>\n")

    def test_random_documents_round_trip(self):
        for index, doc in seeded(20240501, 200, random_document):
            text = serialize(doc)
            assert parse_uiml(text) == doc, f"document #{index} changed on round trip"

    def test_selector_kinds_survive(self):
        doc = parse_uiml(
            b'<uiml><interface><structure><part name="B" class="GButton"/></structure><style>'
            b'<property class-name="GButton" name="text">Go</property>'
            b'<property part-name="B" name="text">Stop</property></style></interface></uiml>')
        first, second = doc.interfaces[0].styles[0].bindings
        assert first.selector.kind == "class"
        assert second.selector == PartSelector(name="B")
        assert parse_uiml(serialize(doc)) == doc


def test_parse_uiml_file_matches_bytes(sample_path):
    doc, _ = parse_uiml_file(sample_path)
    located, _ = parse_uiml_located(read_source(data_path("sample.uiml")), sample_path)
    assert doc == located
