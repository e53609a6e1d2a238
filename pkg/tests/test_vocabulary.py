import json

import pytest

from app.core.errors import DiagnosticsError, UnknownClass, UnknownFamily
from app.schemas.uiml_schema import (
    AddChild,
    Behavior,
    EventOccurs,
    Interface,
    Part,
    Restructure,
    Rule,
    Structure,
    UimlDocument,
)
from app.schemas.vocabulary_schema import FamilyId
from app.services.parser_service import parse_uiml, parse_uiml_located
from app.services.transform_service import identity_mapping_table
from app.services.vocabulary_service import (
    builtin_generic_vocabulary,
    builtin_mapping_table,
    builtin_target_vocabulary,
    check_mapping_table,
    dump_vocabulary,
    family_of,
    load_mapping_table,
    load_vocabulary,
    mapping_options,
    parse_vocabulary,
    save_mapping_table,
    save_vocabulary,
    validate_document,
)


def doc_with(structure: str, extra: str = "") -> bytes:
    return (f'<uiml><interface name="t"><structure>{structure}</structure>{extra}</interface></uiml>').encode()


def diagnostic_codes(text: bytes, vocab=None):
    doc, source_map = parse_uiml_located(text)
    return [d.code for d in validate_document(doc, vocab or builtin_generic_vocabulary(), source_map)]


class TestBuiltins:
    def test_generic_classes(self):
        vocab = builtin_generic_vocabulary()
        assert set(vocab.class_names) == {"GTopContainer", "GArea", "GLabel", "GText", "GList", "GButton"}
        assert vocab.get("GArea").container
        assert not vocab.get("GButton").container
        assert vocab.get("GButton").event_def("GActionEvent") is not None

    def test_mapping_options_default_first(self):
        options = mapping_options("GArea", FamilyId.HTML_DESKTOP)
        assert [o.target_class for o in options] == ["div", "form", "fieldset"]
        assert options[0].default

    def test_single_option_classes(self):
        assert [o.target_class for o in mapping_options("GArea", "wml-phone")] == ["card"]
        assert [o.target_class for o in mapping_options("GList", "voice")] == ["field-choice"]

    def test_unknown_class_in_table(self):
        with pytest.raises(UnknownClass):
            mapping_options("GSlider", FamilyId.HTML_DESKTOP)

    def test_unknown_family(self):
        with pytest.raises(UnknownFamily):
            family_of("smartwatch")

    @pytest.mark.parametrize("family", list(FamilyId))
    def test_builtin_tables_are_total_and_closed(self, family):
        diagnostics = check_mapping_table(
            builtin_mapping_table(family), builtin_generic_vocabulary(), builtin_target_vocabulary(family))
        assert diagnostics == []


class TestValidation:
    def test_sample_is_clean(self, sample_doc, generic_vocab):
        assert validate_document(sample_doc, generic_vocab) == []

    def test_unknown_class_with_line(self):
        text = doc_with('<part name="W" class="GTopContainer">\n<part name="S" class="GSlider"/></part>')
        doc, source_map = parse_uiml_located(text)
        (diagnostic,) = validate_document(doc, builtin_generic_vocabulary(), source_map)
        assert diagnostic.code == "UIML101"
        assert diagnostic.line == 2

    def test_leaf_with_children(self):
        assert diagnostic_codes(doc_with(
            '<part name="B" class="GButton"><part name="L" class="GLabel"/></part>')) == ["UIML102"]

    def test_property_checks(self):
        style = ('<style><property part-name="B" name="colour">red</property>'
                 '<property part-name="B" name="visible">maybe</property>'
                 '<property part-name="Ghost" name="text">x</property>'
                 '<property part-name="B" name="g:map-to:html-desktop">submit</property>'
                 '<property part-name="B" name="text"><reference constant-name="nope"/></property></style>')
        assert diagnostic_codes(doc_with('<part name="B" class="GButton"/>', style)) == [
            "UIML103", "UIML110", "UIML105", "UIML106"]

    def test_event_checks(self):
        behavior = (
            '<behavior>'
            '<rule><condition><event class="GChangedEvent" part-name="B"/></condition>'
            '<action><call name="f"/></action></rule>'
            '<rule><condition><event class="GChangedEvent" part-name="T"/>'
            '<op name="equal"><data key="colour"/><constant>x</constant></op></condition>'
            '<action><call name="f"/></action></rule>'
            '<rule><condition><event class="GTeleportEvent"/></condition>'
            '<action><call name="f"/></action></rule>'
            '</behavior>')
        structure = '<part name="B" class="GButton"/><part name="T" class="GText"/>'
        assert diagnostic_codes(doc_with(structure, behavior)) == ["UIML104", "UIML109", "UIML104"]

    def test_added_parts_are_known(self):
        behavior = (
            '<behavior><rule><condition><event class="GActionEvent" part-name="B"/></condition>'
            '<action><restructure op="add" part-name="A"><part name="New" class="GLabel"/></restructure>'
            '<property part-name="New" name="text">hi</property></action></rule></behavior>')
        structure = '<part name="A" class="GArea"><part name="B" class="GButton"/></part>'
        assert diagnostic_codes(doc_with(structure, behavior)) == []

    def test_added_name_already_in_structure(self):
        behavior = (
            '<behavior><rule><condition><event class="GActionEvent" part-name="B"/></condition>'
            '<action><restructure op="add" part-name="A"><part name="B" class="GButton"/></restructure>'
            '</action></rule></behavior>')
        structure = '<part name="A" class="GArea"><part name="B" class="GButton"/></part>'
        assert diagnostic_codes(doc_with(structure, behavior)) == ["UIML002"]

    def test_added_subtree_repeating_a_name(self):
        subtree = Part(name="N", widget_class="GArea", children=(Part(name="N", widget_class="GLabel"),))
        rule = Rule(
            condition=EventOccurs(source_part="B", event_class="GActionEvent"),
            actions=(Restructure(op=AddChild(parent="A", subtree=subtree)),),
        )
        doc = UimlDocument(interfaces=(Interface(
            name="t",
            structures=(Structure(roots=(
                Part(name="A", widget_class="GArea", children=(Part(name="B", widget_class="GButton"),)),)),),
            behaviors=(Behavior(rules=(rule,)),),
        ),))
        diagnostics = validate_document(doc, builtin_generic_vocabulary())
        assert [d.code for d in diagnostics] == ["UIML002"]
        assert "'N'" in diagnostics[0].message

    def test_add_under_leaf(self):
        behavior = (
            '<behavior><rule><condition><event class="GActionEvent" part-name="B"/></condition>'
            '<action><restructure op="add" part-name="B"><part name="New" class="GLabel"/></restructure>'
            '</action></rule></behavior>')
        assert diagnostic_codes(doc_with('<part name="B" class="GButton"/>', behavior)) == ["UIML102"]

    def test_platform_vocabulary(self):
        text = doc_with('<part name="P" class="page"><part name="L" class="label"/></part>')
        assert diagnostic_codes(text, builtin_target_vocabulary("html-desktop")) == []
        assert diagnostic_codes(text) == ["UIML101", "UIML101"]

    def test_validation_cap(self, override_settings):
        override_settings(max_diagnostics=2)
        structure = "".join(f'<part name="S{i}" class="GSlider"/>' for i in range(5))
        assert diagnostic_codes(doc_with(structure)) == ["UIML101", "UIML101", "UIML011"]


class TestFiles:
    def test_vocabulary_file_round_trip(self, tmp_path):
        path = tmp_path / "generic.json"
        save_vocabulary(builtin_generic_vocabulary(), str(path))
        assert load_vocabulary(str(path)) == builtin_generic_vocabulary()

    def test_vocabulary_json_uses_file_names(self):
        raw = json.loads(dump_vocabulary(builtin_generic_vocabulary()))
        button = next(c for c in raw["classes"] if c["name"] == "GButton")
        assert button["events"][0]["class"] == "GActionEvent"
        assert "dataKeys" in button["events"][0]

    def test_duplicate_class(self):
        text = json.dumps({"name": "v", "classes": [{"name": "A"}, {"name": "A"}]})
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_vocabulary(text)
        assert [d.code for d in exc_info.value.diagnostics] == ["UIML107"]

    def test_schema_violation(self):
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_vocabulary(json.dumps({"name": "v", "classes": [{"container": True}]}))
        assert exc_info.value.diagnostics[0].code == "UIML108"

    def test_not_json(self):
        with pytest.raises(DiagnosticsError) as exc_info:
            parse_vocabulary("{\n  nope")
        (diagnostic,) = exc_info.value.diagnostics
        assert diagnostic.code == "UIML108"
        assert diagnostic.line == 2

    def test_mapping_table_file(self, tmp_path):
        path = tmp_path / "html.json"
        save_mapping_table(builtin_mapping_table("html-desktop"), str(path))
        assert load_mapping_table(str(path)) == builtin_mapping_table("html-desktop")

    def test_mapping_table_needs_one_default(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({
            "family": "wml-phone",
            "entries": {"GArea": [{"target": "card", "default": True}, {"target": "deck", "default": True}]},
        }))
        with pytest.raises(DiagnosticsError):
            load_mapping_table(str(path))

    def test_identity_table_is_closed(self):
        vocab = builtin_generic_vocabulary()
        table = identity_mapping_table(vocab, "voice")
        assert check_mapping_table(table, vocab, vocab) == []


def test_generic_document_fails_against_wrong_vocabulary(sample_doc):
    diagnostics = validate_document(sample_doc, builtin_target_vocabulary("voice"))
    assert {d.code for d in diagnostics} >= {"UIML101"}


def test_parse_then_validate_unknown_property_kind():
    doc = parse_uiml(doc_with('<part name="T" class="GText"/>',
                              '<style><property part-name="T" name="enabled">false</property></style>'))
    assert validate_document(doc, builtin_generic_vocabulary()) == []
