"""
Built-in vocabularies and mapping tables, in the same JSON shape a user
vocabulary or mapping file uses. vocabulary_service loads them through the
schemas, so they get exactly the checks a user file gets.
"""
from typing import Dict, List

_BASE = [
    {"name": "text", "kind": "text"},
    {"name": "visible", "kind": "boolean"},
    {"name": "enabled", "kind": "boolean"},
]


def _cls(name: str, container: bool = False, extra: List[Dict] = (), events: List[Dict] = ()) -> Dict:
    return {
        "name": name,
        "container": container,
        "properties": _BASE + [dict(p) for p in extra],
        "events": [dict(e) for e in events],
    }


def _renamed(cls: Dict, renames: Dict[str, str]) -> Dict:
    cls["properties"] = [
        {"name": renames.get(p["name"], p["name"]), "kind": p["kind"]} for p in cls["properties"]
    ]
    return cls


_VALUE = [{"name": "value", "kind": "text"}]
_LIST = [{"name": "items", "kind": "text"}, {"name": "selected", "kind": "text"}]


def _events(action: str, changed: str, select: str) -> Dict[str, List[Dict]]:
    return {
        "action": [{"class": action, "dataKeys": []}],
        "changed": [{"class": changed, "dataKeys": ["value"]}],
        "select": [{"class": select, "dataKeys": ["item"]}],
    }


_G = _events("GActionEvent", "GChangedEvent", "GSelectEvent")

GENERIC_VOCABULARY = {
    "name": "generic",
    "classes": [
        _cls("GTopContainer", container=True),
        _cls("GArea", container=True),
        _cls("GLabel"),
        _cls("GText", extra=_VALUE, events=_G["changed"]),
        _cls("GList", extra=_LIST, events=_G["select"]),
        _cls("GButton", events=_G["action"]),
    ],
}

_HTML = _events("onclick", "onchange", "onselect")
_WML = _events("accept", "change", "onpick")
_VOICE = _events("confirmed", "filled", "matched")

_BUTTON_RENAMES = {"text": "value"}
_DO_RENAMES = {"text": "label"}
_CHOICE_RENAMES = {"items": "choices"}

TARGET_VOCABULARIES = {
    "html-desktop": {
        "name": "html-desktop",
        "classes": [
            _cls("page", container=True),
            _cls("div", container=True),
            _cls("form", container=True),
            _cls("fieldset", container=True),
            _cls("label"),
            _cls("input-text", extra=_VALUE, events=_HTML["changed"]),
            _cls("select", extra=_LIST, events=_HTML["select"]),
            _renamed(_cls("button", events=_HTML["action"]), _BUTTON_RENAMES),
            _renamed(_cls("submit", events=_HTML["action"]), _BUTTON_RENAMES),
            _renamed(_cls("reset", events=_HTML["action"]), _BUTTON_RENAMES),
        ],
    },
    "wml-phone": {
        "name": "wml-phone",
        "classes": [
            _cls("deck", container=True),
            _cls("card", container=True),
            _cls("text"),
            _cls("input", extra=_VALUE, events=_WML["changed"]),
            _cls("select", extra=_LIST, events=_WML["select"]),
            _renamed(_cls("do-action", events=_WML["action"]), _DO_RENAMES),
        ],
    },
    "voice": {
        "name": "voice",
        "classes": [
            _cls("dialog", container=True),
            _cls("voice-form", container=True),
            _cls("prompt"),
            _cls("field-spoken", extra=_VALUE, events=_VOICE["changed"]),
            _renamed(_cls("field-choice", extra=_LIST, events=_VOICE["select"]), _CHOICE_RENAMES),
            _cls("confirm-action", events=_VOICE["action"]),
        ],
    },
}


def _only(target: str, renames: Dict[str, str] = None) -> List[Dict]:
    return [{"target": target, "default": True, "renames": dict(renames or {})}]


MAPPING_TABLES = {
    "html-desktop": {
        "family": "html-desktop",
        "entries": {
            "GTopContainer": _only("page"),
            "GArea": [
                {"target": "div", "default": True, "renames": {}},
                {"target": "form", "default": False, "renames": {}},
                {"target": "fieldset", "default": False, "renames": {}},
            ],
            "GLabel": _only("label"),
            "GText": _only("input-text"),
            "GList": _only("select"),
            "GButton": [
                {"target": "button", "default": True, "renames": dict(_BUTTON_RENAMES)},
                {"target": "submit", "default": False, "renames": dict(_BUTTON_RENAMES)},
                {"target": "reset", "default": False, "renames": dict(_BUTTON_RENAMES)},
            ],
        },
        "events": {"GActionEvent": "onclick", "GChangedEvent": "onchange", "GSelectEvent": "onselect"},
    },
    "wml-phone": {
        "family": "wml-phone",
        "entries": {
            "GTopContainer": _only("deck"),
            "GArea": _only("card"),
            "GLabel": _only("text"),
            "GText": _only("input"),
            "GList": _only("select"),
            "GButton": _only("do-action", _DO_RENAMES),
        },
        "events": {"GActionEvent": "accept", "GChangedEvent": "change", "GSelectEvent": "onpick"},
    },
    "voice": {
        "family": "voice",
        "entries": {
            "GTopContainer": _only("dialog"),
            "GArea": _only("voice-form"),
            "GLabel": _only("prompt"),
            "GText": _only("field-spoken"),
            "GList": _only("field-choice", _CHOICE_RENAMES),
            "GButton": _only("confirm-action"),
        },
        "events": {"GActionEvent": "confirmed", "GChangedEvent": "filled", "GSelectEvent": "matched"},
    },
}
