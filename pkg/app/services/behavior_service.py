"""
Headless interpreter for behavior rules.

Rules are scanned in document order and every matching rule fires. Events
raised by FireEvent actions are queued and processed after the current one.
A dispatch works on private copies of the state and only returns a new
state when every action succeeded.
"""
import logging
from collections import deque
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from app.config import settings
from app.core.errors import DispatchLimitExceeded, InvalidEvent, RestructureConflict
from app.schemas.behavior_schema import (
    Event,
    EventFired,
    EventScript,
    ExternalCall,
    NoRuleMatched,
    PropertySet,
    Restructured,
    RuntimeState,
    TraceEntry,
)
from app.schemas.uiml_schema import (
    AddChild,
    CallExternal,
    EventDataEquals,
    FireEvent,
    Part,
    PropertyRef,
    Remove,
    Restructure,
    SetProperty,
    Structure,
    UimlDocument,
)
from app.schemas.vocabulary_schema import Vocabulary
from app.services.document_service import bound_properties, find_in_structure, get_interface
from app.services.source_service import read_json_source
from app.services.vocabulary_service import parse_json_model

logger = logging.getLogger(__name__)

Externals = Mapping[str, Callable[..., object]]


def _insert(roots: Tuple[Part, ...], parent: str, subtree: Part) -> Tuple[Part, ...]:
    def visit(part: Part) -> Part:
        if part.name == parent:
            return part.model_copy(update={"children": part.children + (subtree,)})
        return part.model_copy(update={"children": tuple(visit(c) for c in part.children)})
    return tuple(visit(root) for root in roots)


def _remove(roots: Tuple[Part, ...], name: str) -> Tuple[Part, ...]:
    def visit(part: Part) -> Part:
        return part.model_copy(update={"children": tuple(visit(c) for c in part.children if c.name != name)})
    return tuple(visit(root) for root in roots if root.name != name)


class BehaviorEngine:
    """Interprets the rules of one interface"""

    def __init__(
        self,
        doc: UimlDocument,
        interface_name: Optional[str] = None,
        vocab: Optional[Vocabulary] = None,
        externals: Optional[Externals] = None,
    ):
        self.interface = get_interface(doc, interface_name)
        self.rules = list(self.interface.rules())
        self.vocab = vocab
        self.externals = dict(externals or {})

    def init_state(self) -> RuntimeState:
        structure = self.interface.structure
        properties: Dict[Tuple[str, str], str] = {}
        for part in structure.walk():
            for name, value in bound_properties(self.interface, part).items():
                if value is not None:
                    properties[(part.name, name)] = value
        return RuntimeState(properties=properties, structure=structure)

    def check_event(self, structure: Structure, event: Event) -> None:
        if self.vocab is None:
            return
        part = find_in_structure(structure, event.source_part)
        if part is None:
            raise InvalidEvent(f"event {event.label()}: no part named '{event.source_part}'")
        cls = self.vocab.get(part.widget_class)
        if cls is None or cls.event_def(event.event_class) is None:
            raise InvalidEvent(f"event '{event.event_class}' is not allowed for class '{part.widget_class}'")

    @staticmethod
    def matches(condition, event: Event) -> bool:
        if condition.event_class != event.event_class:
            return False
        if condition.source_part is not None and condition.source_part != event.source_part:
            return False
        if isinstance(condition, EventDataEquals):
            return event.data.get(condition.data_key) == condition.expected
        return True

    def dispatch(self, state: RuntimeState, event: Event) -> Tuple[RuntimeState, List[TraceEntry]]:
        self.check_event(state.structure, event)
        limit = settings.dispatch_limit
        properties = dict(state.properties)
        roots = state.structure.roots
        trace: List[TraceEntry] = []
        queue = deque([event])
        processed = 0

        while queue:
            if processed >= limit:
                logger.warning(f"Dispatch of {event.label()} stopped after {processed} dispatches")
                raise DispatchLimitExceeded(limit, processed)
            current = queue.popleft()
            processed += 1
            matched = [rule for rule in self.rules if self.matches(rule.condition, current)]
            if not matched:
                trace.append(NoRuleMatched(event=current))
                continue
            for rule in matched:
                for action in rule.actions:
                    roots = self.execute(action, properties, roots, queue, trace)

        new_state = RuntimeState(
            properties=properties,
            structure=Structure(roots=roots),
            dispatch_count=state.dispatch_count + processed,
        )
        return new_state, trace

    def execute(self, action, properties: Dict, roots: Tuple[Part, ...], queue: deque, trace: List) -> Tuple[Part, ...]:
        if isinstance(action, SetProperty):
            key = (action.part, action.property_name)
            trace.append(PropertySet(
                part=action.part, property_name=action.property_name, old=properties.get(key), new=action.value))
            properties[key] = action.value
        elif isinstance(action, CallExternal):
            args = tuple(
                properties.get((arg.part, arg.property_name), "") if isinstance(arg, PropertyRef) else arg.text
                for arg in action.args
            )
            stub = self.externals.get(action.function)
            result = None if stub is None else str(stub(*args))
            trace.append(ExternalCall(function=action.function, args=args, result=result))
        elif isinstance(action, FireEvent):
            fired = Event(
                event_class=action.event_class,
                source_part=action.source_part,
                data={d.key: d.value for d in action.data},
            )
            trace.append(EventFired(event=fired))
            queue.append(fired)
        elif isinstance(action, Restructure):
            roots = self.restructure(action.op, properties, roots)
            if isinstance(action.op, AddChild):
                trace.append(Restructured(op="add", part=action.op.subtree.name, parent=action.op.parent))
            else:
                trace.append(Restructured(op="remove", part=action.op.part))
        return roots

    def restructure(self, op, properties: Dict, roots: Tuple[Part, ...]) -> Tuple[Part, ...]:
        current = Structure(roots=roots)
        if isinstance(op, AddChild):
            if find_in_structure(current, op.parent) is None:
                raise RestructureConflict(f"cannot add '{op.subtree.name}': no parent part '{op.parent}'")
            added = set()
            for part in op.subtree.walk():
                if part.name in added or find_in_structure(current, part.name) is not None:
                    raise RestructureConflict(f"cannot add '{part.name}': a part with that name exists")
                added.add(part.name)
            for part in op.subtree.walk():
                for name, value in bound_properties(self.interface, part).items():
                    if value is not None:
                        properties[(part.name, name)] = value
            return _insert(roots, op.parent, op.subtree)

        assert isinstance(op, Remove)
        target = find_in_structure(current, op.part)
        if target is None:
            raise RestructureConflict(f"cannot remove '{op.part}': no such part")
        gone = {part.name for part in target.walk()}
        for key in [k for k in properties if k[0] in gone]:
            del properties[key]
        return _remove(roots, op.part)

    def run(self, events: Sequence[Event]) -> Tuple[RuntimeState, List[TraceEntry]]:
        state = self.init_state()
        trace: List[TraceEntry] = []
        for event in events:
            state, entries = self.dispatch(state, event)
            trace.extend(entries)
        logger.info(f"Simulated {len(events)} event(s), {state.dispatch_count} dispatch(es), {len(trace)} trace line(s)")
        return state, trace


def init_state(doc: UimlDocument, interface_name: Optional[str] = None) -> RuntimeState:
    return BehaviorEngine(doc, interface_name).init_state()


def dispatch(
    state: RuntimeState,
    event: Event,
    doc: UimlDocument,
    interface_name: Optional[str] = None,
    vocab: Optional[Vocabulary] = None,
    externals: Optional[Externals] = None,
) -> Tuple[RuntimeState, List[TraceEntry]]:
    return BehaviorEngine(doc, interface_name, vocab, externals).dispatch(state, event)


def run(
    doc: UimlDocument,
    events: Sequence[Event],
    interface_name: Optional[str] = None,
    vocab: Optional[Vocabulary] = None,
    externals: Optional[Externals] = None,
) -> List[TraceEntry]:
    _, trace = BehaviorEngine(doc, interface_name, vocab, externals).run(events)
    return trace


def parse_events(text: str) -> List[Event]:
    return parse_json_model(text, EventScript, "events").root


def load_events(path: str) -> List[Event]:
    events = parse_events(read_json_source(path))
    logger.info(f"Loaded {len(events)} event(s) from {path}")
    return events
