import pytest

from app.core.errors import DispatchLimitExceeded, InvalidEvent, RestructureConflict
from app.schemas.behavior_schema import Event, ExternalCall, NoRuleMatched, render_trace
from app.schemas.uiml_schema import AddChild, Behavior, EventOccurs, Part, Restructure, Rule
from app.schemas.vocabulary_schema import FamilyId
from app.services.behavior_service import BehaviorEngine, dispatch, init_state, load_events, parse_events, run
from app.services.document_service import find_in_structure
from app.services.parser_service import parse_uiml, parse_uiml_file
from app.services.transform_service import plan, to_platform
from app.services.vocabulary_service import builtin_generic_vocabulary, builtin_mapping_table
from tests.generators import random_generic_document, seeded
from tests.helpers import data_path

OK_CLICK = Event(event_class="GActionEvent", source_part="OKBtn")
RESET_CLICK = Event(event_class="GActionEvent", source_part="ResetBtn")

CHAIN = b"""<uiml><interface name="chain">
  <structure>
    <part name="Top" class="GTopContainer">
      <part name="Box" class="GArea">
        <part name="B" class="GButton"/>
        <part name="T" class="GText"/>
        <part name="L" class="GLabel"/>
      </part>
    </part>
  </structure>
  <style>
    <property part-name="New" name="text">hi</property>
  </style>
  <behavior>
    <rule>
      <condition><event class="GActionEvent" part-name="B"/></condition>
      <action>
        <event class="GChangedEvent" part-name="T"><data key="value">x</data></event>
        <property part-name="L" name="text">a</property>
      </action>
    </rule>
    <rule>
      <condition>
        <event class="GChangedEvent" part-name="T"/>
        <op name="equal"><data key="value"/><constant>x</constant></op>
      </condition>
      <action>
        <property part-name="L" name="text">b</property>
      </action>
    </rule>
    <rule>
      <condition><event class="GActionEvent" part-name="L"/></condition>
      <action>
        <restructure op="add" part-name="Box"><part name="New" class="GLabel"/></restructure>
      </action>
    </rule>
    <rule>
      <condition><event class="GActionEvent" part-name="T"/></condition>
      <action>
        <restructure op="remove" part-name="Box"/>
      </action>
    </rule>
    <rule>
      <condition><event class="GSelectEvent" part-name="L"/></condition>
      <action>
        <property part-name="L" name="text">changed</property>
        <restructure op="add" part-name="Missing"><part name="Other" class="GLabel"/></restructure>
      </action>
    </rule>
  </behavior>
</interface></uiml>"""


@pytest.fixture
def chain_doc():
    return parse_uiml(CHAIN)


def with_rules(doc, *rules):
    interface = doc.interfaces[0]
    behaviors = interface.behaviors + (Behavior(rules=rules),)
    return doc.model_copy(update={"interfaces": (interface.model_copy(update={"behaviors": behaviors}),)})


def lines(trace):
    return render_trace(trace).splitlines()


class TestInitialState:
    def test_bound_properties_seed_the_state(self, sample_doc):
        state = init_state(sample_doc)
        assert state.get("OKBtn", "text") == "OK"
        assert state.get("TitleLabel", "text") == "Address Request"
        assert state.get("FirstNameField", "value") is None
        assert state.dispatch_count == 0

    def test_structure_is_the_first_structure(self, sample_doc):
        state = init_state(sample_doc)
        assert state.structure == sample_doc.interfaces[0].structure


class TestDispatch:
    def test_ok_click_calls_submit(self, sample_doc):
        state = init_state(sample_doc)
        state = state.model_copy(update={"properties": {**state.properties, ("FirstNameField", "value"): "Ada"}})
        new_state, trace = dispatch(state, OK_CLICK, sample_doc)
        assert trace == [ExternalCall(function="submit", args=("Ada",))]
        assert lines(trace) == ['CALL submit("Ada")']
        assert new_state.properties == state.properties
        assert new_state.dispatch_count == 1

    def test_reset_clears_the_field(self, sample_doc):
        _, trace = BehaviorEngine(sample_doc).run([RESET_CLICK])
        assert lines(trace) == ['SET FirstNameField.value <unset> -> ""']

    def test_non_matching_event_is_a_no_op(self, sample_doc):
        state = init_state(sample_doc)
        event = Event(event_class="GActionEvent", source_part="CancelBtn")
        new_state, trace = dispatch(state, event, sample_doc)
        assert trace == [NoRuleMatched(event=event)]
        assert lines(trace) == ["NOMATCH GActionEvent@CancelBtn"]
        assert new_state.properties == state.properties
        assert new_state.structure == state.structure

    def test_fired_events_run_after_current_actions(self, chain_doc):
        trace = run(chain_doc, [Event(event_class="GActionEvent", source_part="B")])
        assert lines(trace) == [
            'FIRE GChangedEvent@T {"value": "x"}',
            'SET L.text <unset> -> "a"',
            'SET L.text "a" -> "b"',
        ]

    def test_data_condition_must_match(self, chain_doc):
        event = Event(event_class="GChangedEvent", source_part="T", data={"value": "y"})
        assert lines(run(chain_doc, [event])) == ["NOMATCH GChangedEvent@T"]

    def test_externals_answer_calls(self, sample_doc):
        trace = run(sample_doc, [OK_CLICK], externals={"submit": lambda *args: "queued"})
        assert lines(trace) == ['CALL submit("") = "queued"']


class TestRestructure:
    def test_add_seeds_bound_properties(self, chain_doc):
        engine = BehaviorEngine(chain_doc)
        state, trace = engine.run([Event(event_class="GActionEvent", source_part="L")])
        assert lines(trace) == ["RESTRUCTURE add New under Box"]
        assert find_in_structure(state.structure, "New") is not None
        assert state.get("New", "text") == "hi"

    def test_remove_drops_subtree_properties(self, chain_doc):
        engine = BehaviorEngine(chain_doc)
        state, _ = engine.run([
            Event(event_class="GActionEvent", source_part="B"),
            Event(event_class="GActionEvent", source_part="T"),
        ])
        assert find_in_structure(state.structure, "L") is None
        assert state.get("L", "text") is None
        assert [p.name for p in state.structure.walk()] == ["Top"]

    def test_conflict_leaves_state_untouched(self, chain_doc):
        engine = BehaviorEngine(chain_doc)
        state = engine.init_state()
        with pytest.raises(RestructureConflict):
            engine.dispatch(state, Event(event_class="GSelectEvent", source_part="L", data={"item": "x"}))
        assert state.get("L", "text") is None
        assert state.dispatch_count == 0

    def test_adding_an_existing_name_conflicts(self, chain_doc):
        engine = BehaviorEngine(chain_doc)
        state, _ = engine.run([Event(event_class="GActionEvent", source_part="L")])
        with pytest.raises(RestructureConflict):
            engine.dispatch(state, Event(event_class="GActionEvent", source_part="L"))

    def test_subtree_repeating_a_name_conflicts(self, chain_doc):
        subtree = Part(name="N", widget_class="GArea", children=(Part(name="N", widget_class="GLabel"),))
        rule = Rule(
            condition=EventOccurs(source_part="Box", event_class="GActionEvent"),
            actions=(Restructure(op=AddChild(parent="Box", subtree=subtree)),),
        )
        doc = with_rules(chain_doc, rule)
        engine = BehaviorEngine(doc)
        state = engine.init_state()
        with pytest.raises(RestructureConflict):
            engine.dispatch(state, Event(event_class="GActionEvent", source_part="Box"))


class TestLimits:
    def test_self_firing_rule_stops_at_limit(self):
        doc, _ = parse_uiml_file(data_path("cyclic.uiml"))
        with pytest.raises(DispatchLimitExceeded) as exc_info:
            run(doc, [Event(event_class="GActionEvent", source_part="Go")])
        assert exc_info.value.dispatches == 1000
        assert exc_info.value.limit == 1000

    def test_limit_is_configurable(self, override_settings):
        override_settings(dispatch_limit=5)
        doc, _ = parse_uiml_file(data_path("cyclic.uiml"))
        with pytest.raises(DispatchLimitExceeded) as exc_info:
            run(doc, [Event(event_class="GActionEvent", source_part="Go")])
        assert exc_info.value.dispatches == 5


class TestEventChecks:
    def test_event_not_allowed_for_class(self, sample_doc):
        event = Event(event_class="GActionEvent", source_part="FirstNameField")
        with pytest.raises(InvalidEvent):
            run(sample_doc, [event], vocab=builtin_generic_vocabulary())

    def test_event_for_missing_part(self, sample_doc):
        with pytest.raises(InvalidEvent):
            run(sample_doc, [Event(event_class="GActionEvent", source_part="Ghost")],
                vocab=builtin_generic_vocabulary())

    def test_unchecked_without_vocabulary(self, sample_doc):
        trace = run(sample_doc, [Event(event_class="GActionEvent", source_part="Ghost")])
        assert lines(trace) == ["NOMATCH GActionEvent@Ghost"]


class TestEventFiles:
    def test_load_events(self):
        assert load_events(data_path("ok_click.json")) == [OK_CLICK]

    def test_event_data(self):
        (event,) = parse_events('[{"class": "GChangedEvent", "source": "T", "data": {"value": "x"}}]')
        assert event.data == {"value": "x"}
        assert event.label() == "GChangedEvent@T"


@pytest.mark.parametrize("family", list(FamilyId))
def test_trace_survives_transform(sample_doc, family):
    table = builtin_mapping_table(family)
    platform = to_platform(sample_doc, plan(sample_doc, family))
    events = [OK_CLICK, RESET_CLICK]
    renamed = [e.model_copy(update={"event_class": table.rename_event(e.event_class)}) for e in events]
    assert render_trace(run(platform, renamed)) == render_trace(run(sample_doc, events))


def test_unmatched_events_leave_random_documents_unchanged():
    for index, doc in seeded(11, 200, random_generic_document):
        engine = BehaviorEngine(doc)
        state = engine.init_state()
        parts = list(state.structure.walk())
        events = [Event(event_class="GSelectEvent", source_part=p.name, data={"item": "x"}) for p in parts]
        events += [Event(event_class="GActionEvent", source_part=p.name) for p in parts if p.widget_class != "GButton"]
        for event in events:
            new_state, trace = engine.dispatch(state, event)
            assert trace == [NoRuleMatched(event=event)], f"document #{index}: {event.label()} matched a rule"
            assert new_state.properties == state.properties, f"document #{index}: {event.label()} changed a property"
            assert new_state.structure == state.structure, f"document #{index}: {event.label()} changed the structure"
