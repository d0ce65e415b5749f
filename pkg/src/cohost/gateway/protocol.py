"""Newline-delimited JSON wire protocol.

Every record is one line::

    {"v":1,"type":"<type>","t_ms":<int>,"payload":{...}}

Input record types and payloads:

    meeting_start  {"config": {MeetingConfig fields}, "roster": [{"id": str, "role": "host"|"member"|"cohost"}]}
    voice          {"p": str, "active": bool}
    chat           {"from": str, "text": str}
    tick           {"t": int}            t_ms must equal t * 1000
    meeting_end    {}

Output record types:

    message        {"to": str, "text": str, "kind": str, "question": int|null, "chart": spec|null}
    log            {"text": str}
    error          {"field": str, "reason": str}

Serialization is canonical: envelope keys in the order above, payload keys
sorted, no insignificant whitespace, UTF-8 without escaping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Union

from ..engine import Chat, DirectMessage, InputEvent, LogEntry, MeetingEnd, MeetingStart, OutputAction, Tick, Voice
from ..intervene import VisualizationSpec
from ..model import CohostError, MeetingConfig, Roster

VERSION = 1

EVENT_TYPES = ("meeting_start", "voice", "chat", "tick", "meeting_end")
ACTION_TYPES = ("message", "log")


class ProtocolError(ValueError):
    def __init__(self, field: str, reason: str) -> None:
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


@dataclass(frozen=True)
class ErrorRecord:
    t_ms: int
    field: str
    reason: str


Record = Union[InputEvent, OutputAction, ErrorRecord]


def _line(kind: str, t_ms: int, payload: dict) -> str:
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)
    return f'{{"v":{VERSION},"type":"{kind}","t_ms":{t_ms},"payload":{body}}}'


# ---- encoding ------------------------------------------------------------------


def encode_event(ev: InputEvent) -> str:
    if isinstance(ev, MeetingStart):
        return _line("meeting_start", ev.t_ms, {"config": ev.config.to_dict(), "roster": ev.roster.to_list()})
    if isinstance(ev, Voice):
        return _line("voice", ev.t_ms, {"p": ev.participant, "active": ev.active})
    if isinstance(ev, Chat):
        return _line("chat", ev.t_ms, {"from": ev.sender, "text": ev.text})
    if isinstance(ev, Tick):
        return _line("tick", ev.t_ms, {"t": ev.t})
    if isinstance(ev, MeetingEnd):
        return _line("meeting_end", ev.t_ms, {})
    raise TypeError(f"not an input event: {ev!r}")


def encode_action(action: OutputAction | ErrorRecord) -> str:
    if isinstance(action, DirectMessage):
        payload = {
            "to": action.to,
            "text": action.text,
            "kind": action.kind,
            "question": action.question,
            "chart": action.chart.to_dict() if action.chart is not None else None,
        }
        return _line("message", action.t_ms, payload)
    if isinstance(action, LogEntry):
        return _line("log", action.t_ms, {"text": action.text})
    if isinstance(action, ErrorRecord):
        return _line("error", action.t_ms, {"field": action.field, "reason": action.reason})
    raise TypeError(f"not an output action: {action!r}")


def encode(record: Record) -> str:
    if isinstance(record, (DirectMessage, LogEntry, ErrorRecord)):
        return encode_action(record)
    return encode_event(record)


# ---- decoding ------------------------------------------------------------------


def _envelope(line: str) -> tuple[str, int, dict]:
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProtocolError("line", f"not valid JSON ({exc.msg if hasattr(exc, 'msg') else exc})") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("line", "record must be a JSON object")
    if "v" not in obj:
        raise ProtocolError("v", "missing")
    if obj["v"] != VERSION:
        raise ProtocolError("v", f"unsupported protocol version {obj['v']!r}")
    kind = obj.get("type")
    if not isinstance(kind, str):
        raise ProtocolError("type", "missing or not a string")
    if "t_ms" not in obj:
        raise ProtocolError("t_ms", "missing")
    t_ms = obj["t_ms"]
    if isinstance(t_ms, bool) or not isinstance(t_ms, int) or t_ms < 0:
        raise ProtocolError("t_ms", "must be a non-negative integer")
    payload = obj.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolError("payload", "must be an object")
    extra = set(obj) - {"v", "type", "t_ms", "payload"}
    if extra:
        raise ProtocolError(sorted(extra)[0], "unexpected field")
    return kind, t_ms, payload


def _get(payload: dict, key: str, types: type | tuple, what: str) -> Any:
    if key not in payload:
        raise ProtocolError(f"payload.{key}", "missing")
    value = payload[key]
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ProtocolError(f"payload.{key}", f"must be {what}")
    if not isinstance(value, types):
        raise ProtocolError(f"payload.{key}", f"must be {what}")
    return value


def _nonempty_str(payload: dict, key: str) -> str:
    value = _get(payload, key, str, "a string")
    if not value.strip():
        raise ProtocolError(f"payload.{key}", "must be non-empty")
    return value


def _event(kind: str, t_ms: int, payload: dict) -> InputEvent:
    if kind == "meeting_start":
        config = _get(payload, "config", dict, "an object")
        roster = _get(payload, "roster", list, "a list")
        try:
            return MeetingStart(MeetingConfig.from_dict(config), Roster.from_list(roster), t_ms)
        except (CohostError, TypeError) as exc:
            raise ProtocolError("payload", str(exc)) from exc
    if kind == "voice":
        return Voice(_nonempty_str(payload, "p"), _get(payload, "active", bool, "a boolean"), t_ms)
    if kind == "chat":
        return Chat(_nonempty_str(payload, "from"), _nonempty_str(payload, "text"), t_ms)
    if kind == "tick":
        t = _get(payload, "t", int, "an integer")
        if t < 1:
            raise ProtocolError("payload.t", "must be >= 1")
        if t * 1000 != t_ms:
            raise ProtocolError("t_ms", f"tick {t} must carry t_ms {t * 1000}")
        return Tick(t)
    if kind == "meeting_end":
        return MeetingEnd(t_ms)
    raise ProtocolError("type", f"unknown event type {kind!r}")


def _action(kind: str, t_ms: int, payload: dict) -> OutputAction | ErrorRecord:
    if kind == "message":
        question = payload.get("question")
        if question is not None and (isinstance(question, bool) or not isinstance(question, int)):
            raise ProtocolError("payload.question", "must be an integer or null")
        chart = payload.get("chart")
        if chart is not None:
            try:
                chart = VisualizationSpec.from_dict(chart)
            except (KeyError, TypeError, ValueError) as exc:
                raise ProtocolError("payload.chart", str(exc)) from exc
        return DirectMessage(
            t_ms,
            _nonempty_str(payload, "to"),
            _get(payload, "text", str, "a string"),
            _get(payload, "kind", str, "a string"),
            question,
            chart,
        )
    if kind == "log":
        return LogEntry(t_ms, _get(payload, "text", str, "a string"))
    if kind == "error":
        return ErrorRecord(t_ms, _get(payload, "field", str, "a string"), _get(payload, "reason", str, "a string"))
    raise ProtocolError("type", f"unknown action type {kind!r}")


def decode_event(line: str) -> InputEvent:
    kind, t_ms, payload = _envelope(line)
    if kind not in EVENT_TYPES:
        raise ProtocolError("type", f"unknown event type {kind!r}")
    try:
        return _event(kind, t_ms, payload)
    except ValueError as exc:
        if isinstance(exc, ProtocolError):
            raise
        raise ProtocolError("payload", str(exc)) from exc


def decode_action(line: str) -> OutputAction | ErrorRecord:
    kind, t_ms, payload = _envelope(line)
    return _action(kind, t_ms, payload)


def decode(line: str) -> Record:
    kind, t_ms, payload = _envelope(line)
    if kind in EVENT_TYPES:
        return decode_event(line)
    return _action(kind, t_ms, payload)


def error_record(exc: Exception, t_ms: int) -> ErrorRecord:
    if isinstance(exc, ProtocolError):
        return ErrorRecord(t_ms, exc.field, exc.reason)
    return ErrorRecord(t_ms, "event", f"{type(exc).__name__}: {exc}")
