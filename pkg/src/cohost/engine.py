"""The observe/ask/intervene loop as a deterministic fold over an ordered event stream.

``apply`` mutates an :class:`EngineState` in place and returns the actions the
event caused; ``step`` is the pure variant that works on a copy. Wall-clock
time is never read.
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import Iterable, Union

from . import ask, intervene, observe, templates
from .ask import DialogueSession, HostReason, Stage
from .intervene import InterventionKind, InterventionState, QueuedMessage, VisualizationSpec
from .model import (
    ChatEvent,
    ClockError,
    CohostError,
    MeetingConfig,
    Roster,
    RosterError,
    Role,
    SpeakingLedger,
    VoiceEvent,
)


class Phase(str, enum.Enum):
    OBSERVING = "observing"
    ASKING = "asking"
    INTERVENING = "intervening"
    ENDED = "ended"


# ---- input events ----------------------------------------------------------


@dataclass(frozen=True)
class MeetingStart:
    config: MeetingConfig
    roster: Roster
    t_ms: int = 0


@dataclass(frozen=True)
class Voice:
    participant: str
    active: bool
    t_ms: int


@dataclass(frozen=True)
class Chat:
    sender: str
    text: str
    t_ms: int

    def __post_init__(self) -> None:
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValueError("chat text must be non-empty after trimming")


@dataclass(frozen=True)
class Tick:
    t: int  # seconds

    @property
    def t_ms(self) -> int:
        return self.t * 1000


@dataclass(frozen=True)
class MeetingEnd:
    t_ms: int


InputEvent = Union[MeetingStart, Voice, Chat, Tick, MeetingEnd]


# ---- output actions --------------------------------------------------------


@dataclass(frozen=True)
class DirectMessage:
    t_ms: int
    to: str
    text: str
    kind: str
    question: int | None = None
    chart: VisualizationSpec | None = None


@dataclass(frozen=True)
class LogEntry:
    t_ms: int
    text: str


OutputAction = Union[DirectMessage, LogEntry]


@dataclass
class TriggerRecord:
    t: int
    reason: observe.TriggerReason
    cumulative: dict[str, int]
    under: list[str]
    over: list[str]


@dataclass
class EngineState:
    config: MeetingConfig
    roster: Roster
    ledger: SpeakingLedger
    phase: Phase = Phase.OBSERVING
    sessions: list[DialogueSession] = field(default_factory=list)
    interventions: list[InterventionState] = field(default_factory=list)
    queue: list[QueuedMessage] = field(default_factory=list)
    log: list[OutputAction] = field(default_factory=list)
    trigger: TriggerRecord | None = None
    host_reason: HostReason = HostReason.NONE
    over_activated: bool = False
    forwarded: dict[str, int] = field(default_factory=dict)
    delivered: list[QueuedMessage] = field(default_factory=list)
    dropped: list[QueuedMessage] = field(default_factory=list)
    last_t_ms: int = 0
    ended_t_ms: int | None = None

    @property
    def asked(self) -> bool:
        return self.trigger is not None

    def session_for(self, pid: str) -> DialogueSession | None:
        for s in self.sessions:
            if s.participant == pid:
                return s
        return None

    def stopped_by(self, pid: str) -> bool:
        return any(st.receiver == pid and st.stopped for st in self.interventions)

    def live_states(self, pid: str) -> list[InterventionState]:
        return [st for st in self.interventions if st.receiver == pid and not st.stopped]


class _Emitter:
    def __init__(self, state: EngineState, t_ms: int) -> None:
        self.state = state
        self.t_ms = t_ms
        self.actions: list[OutputAction] = []

    def dm(self, to: str, text: str, kind: str, question: int | None = None, chart=None) -> None:
        if self.state.stopped_by(to):
            self.note(f"{kind} message to {to} suppressed: receiver asked the co-host to stop")
            return
        self._push(DirectMessage(self.t_ms, to, text, kind, question, chart))

    def prompt(self, p: ask.Prompt) -> None:
        self.dm(p.to, p.text, p.kind, p.question)

    def note(self, text: str) -> None:
        self._push(LogEntry(self.t_ms, text))

    def _push(self, action: OutputAction) -> None:
        self.actions.append(action)
        self.state.log.append(action)


def init(config: MeetingConfig, roster: Roster) -> tuple[EngineState, list[OutputAction]]:
    state = EngineState(config, roster, SpeakingLedger(roster))
    out = _Emitter(state, 0)
    intro = templates.INTRO.format(host=roster.host)
    for pid in roster.humans:
        out.dm(pid, intro, "intro")
    return state, out.actions


def step(state: EngineState, event: InputEvent) -> tuple[EngineState, list[OutputAction]]:
    """Pure transition: the input state is left untouched."""
    new = copy.deepcopy(state)
    return new, apply(new, event)


def apply(state: EngineState, event: InputEvent) -> list[OutputAction]:
    if isinstance(event, MeetingStart):
        raise CohostError("meeting already started")
    t_ms = event.t_ms
    if state.phase is Phase.ENDED:
        out = _Emitter(state, state.last_t_ms)
        out.note(f"ignored {type(event).__name__.lower()} event after meeting end")
        return out.actions
    if t_ms < state.last_t_ms:
        raise ClockError(f"event at {t_ms} ms precedes last processed time {state.last_t_ms} ms")
    if isinstance(event, Voice):
        state.ledger.ingest_voice(VoiceEvent(event.participant, event.active, t_ms))
        state.last_t_ms = t_ms
        return []
    if isinstance(event, Tick):
        state.ledger.sample_tick(event.t)
        state.last_t_ms = t_ms
        return _on_tick(state, event.t)
    if isinstance(event, Chat):
        if event.sender not in state.roster:
            raise RosterError(f"unknown participant {event.sender!r}")
        state.last_t_ms = t_ms
        return _on_chat(state, ChatEvent(event.sender, event.text, t_ms))
    if isinstance(event, MeetingEnd):
        state.last_t_ms = t_ms
        return _on_end(state, t_ms)
    raise TypeError(f"not an input event: {event!r}")


def _on_tick(state: EngineState, t: int) -> list[OutputAction]:
    out = _Emitter(state, t * 1000)
    ledger, config = state.ledger, state.config

    if state.phase is Phase.OBSERVING:
        reason = observe.evaluate_trigger(ledger, t, config, state.asked)
        if reason is not None:
            under = observe.under_participators(ledger)
            state.trigger = TriggerRecord(t, reason, ledger.snapshot(), under, observe.over_participators(ledger))
            state.phase = Phase.ASKING
            out.note(f"ask phase entered: {_describe(reason)}; asking {', '.join(under)}")
            sessions, prompts = ask.open_sessions(under)
            state.sessions.extend(sessions)
            for p in prompts:
                out.prompt(p)

    if state.sessions:
        _activate(state, t, out)

    state.queue.extend(intervene.refresh_due(state.interventions, ledger, t, config))

    for msg in intervene.gate_and_deliver(state.queue, ledger, t * 1000, config):
        state.delivered.append(msg)
        out.dm(msg.to, msg.text, msg.kind, chart=msg.chart)
    return out.actions


def _activate(state: EngineState, t: int, out: _Emitter) -> None:
    agg = ask.aggregate(s.activation() for s in state.sessions)
    host = state.roster.host
    new_reason = agg.host_reason & ~state.host_reason
    host_state = next((st for st in state.interventions if st.kind is not InterventionKind.OVER_PARTICIPATOR), None)

    if new_reason:
        if host_state is None:
            st, msg = intervene.activate_host(agg.host_reason, state.ledger, host, t, state.config)
            state.interventions.append(st)
            state.queue.append(msg)
            out.note(f"host intervention activated ({agg.host_reason.label}) for {host}")
        else:
            # one host state per meeting; a later reason only adds its explanation
            host_state.reasons.append(new_reason.label)
            if not host_state.stopped:
                state.queue.append(
                    QueuedMessage(host, templates.host_message(new_reason.label), "intervention", t * 1000,
                                  intervene.build_host_chart(state.ledger))
                )
            out.note(f"host intervention reason extended ({new_reason.label})")
        state.host_reason |= new_reason

    if agg.over_participator_intervention and not state.over_activated:
        state.over_activated = True
        # membership is frozen at activation time
        over_list = observe.over_participators(state.ledger)
        states, msgs = intervene.activate_over(over_list, state.ledger, t, state.config)
        state.interventions.extend(states)
        state.queue.extend(msgs)
        if states:
            out.note("over-participator intervention activated for " + ", ".join(s.receiver for s in states))
        else:
            out.note("over-participator intervention skipped: too few non-host members for a comparison chart")

    if state.interventions and state.phase is Phase.ASKING:
        state.phase = Phase.INTERVENING

    host_stopped = bool(host_state and host_state.stopped)
    for s in state.sessions:
        notes = s.activation().feedback_notes
        sent = state.forwarded.get(s.participant, 0)
        if len(notes) > sent:
            state.forwarded[s.participant] = len(notes)
            if host_stopped:
                out.note("anonymous feedback withheld: host stopped co-host messages")
                continue
            state.queue.extend(intervene.forward_feedback(host, list(notes[sent:]), t))
            out.note("anonymous feedback queued for host")


def _on_chat(state: EngineState, ev: ChatEvent) -> list[OutputAction]:
    out = _Emitter(state, ev.t)
    pid = ev.sender
    if state.roster.roles[pid] is Role.COHOST:
        out.note("ignored chat from the co-host itself")
        return out.actions
    if intervene.is_stop(ev.text) and state.live_states(pid):
        dropped = intervene.handle_stop(state.interventions, state.queue, pid, ev.text, ev.t)
        state.dropped.extend(dropped)
        out.note(f"{pid} asked the co-host to stop; {len(dropped)} queued message(s) dropped")
        return out.actions
    session = state.session_for(pid)
    if session is not None and session.stage.open:
        answer = ask.parse_reply(session.stage, ev.text)
        _, prompts, _ = ask.advance(session, answer)
        for p in prompts:
            out.prompt(p)
        return out.actions
    out.note(f"ignored chat from {pid}: no open question")
    return out.actions


def _on_end(state: EngineState, t_ms: int) -> list[OutputAction]:
    out = _Emitter(state, t_ms)
    for s in state.sessions:
        if s.stage is Stage.AWAITING_Q1:
            s.stage = Stage.SILENT
    state.dropped.extend(state.queue)
    dropped = len(state.queue)
    state.queue.clear()
    state.phase = Phase.ENDED
    state.ended_t_ms = t_ms
    out.note(
        f"meeting ended at {t_ms} ms: {len(state.delivered)} queued message(s) delivered, {dropped} dropped"
    )
    return out.actions


def _describe(reason: observe.TriggerReason) -> str:
    if isinstance(reason, observe.RatioImbalance):
        return f"ratio imbalance ({reason.participant}, {reason.ratio:.6g}x average)"
    return "half of the scheduled time elapsed"


# ---- report ------------------------------------------------------------------


@dataclass
class MeetingReport:
    cumulative: dict[str, int]
    elapsed: int
    trigger_t: int | None
    trigger_reason: dict | None
    cumulative_at_trigger: dict[str, int]
    under_participators: list[str]
    over_participators: list[str]
    sessions: list[dict]
    interventions: list[dict]
    messages_delivered: int
    messages_dropped: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def reason_to_dict(reason: observe.TriggerReason) -> dict:
    if isinstance(reason, observe.RatioImbalance):
        return {"kind": reason.kind, "participant": reason.participant, "ratio": reason.ratio}
    return {"kind": reason.kind}


def _answer_label(a) -> str:
    return a.text if isinstance(a, ask.FreeText) else a.value


def finalize(state: EngineState) -> MeetingReport:
    if state.phase is not Phase.ENDED:
        raise CohostError("finalize called before the meeting ended")
    trig = state.trigger
    return MeetingReport(
        cumulative={pid: state.ledger.cumulative[pid] for pid in state.roster.humans},
        elapsed=state.ledger.elapsed,
        trigger_t=trig.t if trig else None,
        trigger_reason=reason_to_dict(trig.reason) if trig else None,
        cumulative_at_trigger={pid: trig.cumulative[pid] for pid in state.roster.humans} if trig else {},
        under_participators=list(trig.under) if trig else [],
        over_participators=list(trig.over) if trig else [],
        sessions=[
            {
                "participant": s.participant,
                "stage": s.stage.value,
                "answers": {str(k): _answer_label(v) for k, v in sorted(s.answers.items())},
            }
            for s in state.sessions
        ],
        interventions=[
            {
                "kind": st.kind.value,
                "receiver": st.receiver,
                "activated_t": st.activated_t,
                "reasons": list(st.reasons),
                "refresh_times": list(st.refresh_times),
                "stopped": st.stopped,
                "stopped_t_ms": st.stopped_t,
            }
            for st in state.interventions
        ],
        messages_delivered=len(state.delivered),
        messages_dropped=len(state.dropped),
    )


class Engine:
    """Convenience wrapper feeding a whole event stream, starting with :class:`MeetingStart`."""

    def __init__(self) -> None:
        self.state: EngineState | None = None

    def feed(self, event: InputEvent) -> list[OutputAction]:
        if isinstance(event, MeetingStart):
            if self.state is not None:
                raise CohostError("meeting already started")
            self.state, actions = init(event.config, event.roster)
            return actions
        if self.state is None:
            raise CohostError("the first event must be meeting_start")
        return apply(self.state, event)

    def run(self, events: Iterable[InputEvent]) -> list[OutputAction]:
        actions: list[OutputAction] = []
        for ev in events:
            actions.extend(self.feed(ev))
        return actions

    def report(self) -> MeetingReport:
        if self.state is None:
            raise CohostError("no meeting")
        return finalize(self.state)
