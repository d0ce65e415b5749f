import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cohost.engine import Chat, DirectMessage, LogEntry, MeetingEnd, MeetingStart, Tick, Voice
from cohost.gateway.protocol import (
    ErrorRecord,
    ProtocolError,
    decode,
    decode_action,
    decode_event,
    encode,
    encode_action,
    encode_event,
)
from cohost.intervene import Bar, ChartKind, VisualizationSpec
from cohost.model import MeetingConfig, Participant, Role, Roster

ids = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8).filter(str.strip)
texts = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=40).filter(str.strip)
t_ms = st.integers(0, 10**9)

bars = st.builds(Bar, ids, st.one_of(st.integers(0, 10**6), st.floats(0, 1e6, allow_nan=False)), st.booleans())
charts = st.one_of(
    st.builds(VisualizationSpec, st.just(ChartKind.PER_MEMBER), st.lists(bars, min_size=1, max_size=6).map(tuple), st.integers(0, 10**5)),
    st.builds(VisualizationSpec, st.just(ChartKind.SELF_VS_AVERAGE), st.tuples(bars, bars), st.integers(0, 10**5)),
)
messages = st.builds(
    DirectMessage,
    t_ms,
    ids,
    st.text(max_size=60),
    st.sampled_from(["intro", "question", "reprompt", "ack", "close", "intervention", "refresh", "feedback"]),
    st.one_of(st.none(), st.integers(1, 3)),
    st.one_of(st.none(), charts),
)
actions = st.one_of(
    messages,
    st.builds(LogEntry, t_ms, st.text(max_size=60)),
    st.builds(ErrorRecord, t_ms, st.sampled_from(["t_ms", "type", "payload.text", "line", "event"]), st.text(max_size=40)),
)


@st.composite
def meeting_starts(draw):
    members = draw(st.lists(ids.filter(lambda s: s not in ("cohost", "H")), min_size=1, max_size=5, unique=True))
    roster = Roster([Participant("H", Role.HOST), *(Participant(m) for m in members)])
    config = MeetingConfig(draw(st.integers(1, 10_000)), refresh_interval=draw(st.integers(1, 600)))
    return MeetingStart(config, roster)


events = st.one_of(
    meeting_starts(),
    st.builds(Voice, ids, st.booleans(), t_ms),
    st.builds(Chat, ids, texts, t_ms),
    st.builds(Tick, st.integers(1, 10**6)),
    st.builds(MeetingEnd, t_ms),
)


@given(actions)
def test_action_round_trip(action):
    line = encode_action(action)
    assert "\n" not in line
    assert decode_action(line) == action
    assert encode(decode(line)) == line


@given(events)
def test_event_round_trip(event):
    line = encode_event(event)
    assert decode_event(line) == event
    assert encode_event(decode_event(line)) == line


def test_voice_record():
    ev = decode_event('{"v":1,"type":"voice","t_ms":1000,"payload":{"p":"A","active":true}}')
    assert ev == Voice("A", True, 1000)


def test_canonicalization():
    messy = '{ "payload": {"active": true, "p": "A"}, "t_ms": 1000, "type": "voice", "v": 1 }'
    assert encode_event(decode_event(messy)) == '{"v":1,"type":"voice","t_ms":1000,"payload":{"active":true,"p":"A"}}'


def test_canonical_field_order():
    line = encode_action(DirectMessage(5, "A", "hi", "ack"))
    assert list(json.loads(line)) == ["v", "type", "t_ms", "payload"]
    assert line == '{"v":1,"type":"message","t_ms":5,"payload":{"chart":null,"kind":"ack","question":null,"text":"hi","to":"A"}}'


@pytest.mark.parametrize(
    "line, field",
    [
        ('{"v":1,"type":"voice","payload":{"p":"A","active":true}}', "t_ms"),
        ('{"v":1,"type":"chat","t_ms":5,"payload":{"from":"A","text":"  "}}', "payload.text"),
        ('{"v":1,"type":"dance","t_ms":5,"payload":{}}', "type"),
        ('{"v":2,"type":"tick","t_ms":1000,"payload":{"t":1}}', "v"),
        ('{"v":1,"type":"tick","t_ms":1500,"payload":{"t":1}}', "t_ms"),
        ('{"v":1,"type":"voice","t_ms":-1,"payload":{"p":"A","active":true}}', "t_ms"),
        ('{"v":1,"type":"voice","t_ms":1,"payload":{"p":"A","active":"yes"}}', "payload.active"),
        ('{"v":1,"type":"tick","t_ms":1000,"payload":{"t":true}}', "payload.t"),
        ('{"v":1,"type":"meeting_start","t_ms":0,"payload":{"config":{"scheduled_duration":60},"roster":[{"id":"A","role":"member"}]}}', "payload"),
        ("not json", "line"),
        ("[1,2]", "line"),
        ('{"v":1,"type":"message","t_ms":0,"payload":{"to":"A","text":"x","kind":"ack"}}', "type"),
    ],
)
def test_decode_errors_name_the_field(line, field):
    with pytest.raises(ProtocolError) as info:
        decode_event(line)
    assert info.value.field == field


def test_error_records_round_trip():
    rec = ErrorRecord(12, "payload.text", "must be non-empty")
    assert decode(encode(rec)) == rec
