"""Private interventions: activation, periodic chart refresh, mic-quiet delivery gate, stop."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from . import templates
from .ask import HostReason, InterventionActivation
from .model import MeetingConfig, SpeakingLedger

log = logging.getLogger(__name__)

# message kinds that wait behind the delivery gate
GATED_KINDS = frozenset({"intervention", "refresh", "feedback"})


class InterventionKind(str, enum.Enum):
    HOST_EXPRESSION = "host_expression"
    HOST_INHIBITION = "host_inhibition"
    OVER_PARTICIPATOR = "over_participator"


class ChartKind(str, enum.Enum):
    PER_MEMBER = "per_member"
    SELF_VS_AVERAGE = "self_vs_average"


@dataclass(frozen=True)
class Bar:
    label: str
    seconds: int | float
    highlight: bool = False

    def to_dict(self) -> dict:
        return {"label": self.label, "seconds": self.seconds, "highlight": self.highlight}


@dataclass(frozen=True)
class VisualizationSpec:
    kind: ChartKind
    bars: tuple[Bar, ...]
    as_of_t: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ChartKind(self.kind))
        if not self.bars:
            raise ValueError("a chart needs at least one bar")
        if self.kind is ChartKind.SELF_VS_AVERAGE and len(self.bars) != 2:
            raise ValueError("a self-vs-average chart has exactly two bars")
        for bar in self.bars:
            if isinstance(bar.seconds, bool) or not isinstance(bar.seconds, (int, float)) or bar.seconds < 0:
                raise ValueError(f"bar {bar.label!r} has invalid seconds {bar.seconds!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "as_of_t": self.as_of_t, "bars": [b.to_dict() for b in self.bars]}

    @classmethod
    def from_dict(cls, data: dict) -> VisualizationSpec:
        bars = tuple(Bar(b["label"], b["seconds"], bool(b.get("highlight", False))) for b in data["bars"])
        return cls(ChartKind(data["kind"]), bars, int(data["as_of_t"]))


@dataclass
class QueuedMessage:
    to: str
    text: str
    kind: str
    enqueued_t: int  # ms
    chart: VisualizationSpec | None = None
    delivered_t: int | None = None


@dataclass
class InterventionState:
    kind: InterventionKind
    receiver: str
    activated_t: int
    next_refresh_t: int
    active: bool = True
    stopped: bool = False
    stopped_t: int | None = None
    reasons: list[str] = field(default_factory=list)
    refresh_times: list[int] = field(default_factory=list)


def build_host_chart(ledger: SpeakingLedger) -> VisualizationSpec:
    totals = ledger.non_host_totals()
    avg = ledger.average_nonhost()
    order = sorted(totals, key=lambda pid: (totals[pid], pid))
    bars = tuple(Bar(pid, totals[pid], totals[pid] < avg) for pid in order)
    return VisualizationSpec(ChartKind.PER_MEMBER, bars, ledger.elapsed)


def build_self_vs_avg_chart(ledger: SpeakingLedger, pid: str) -> VisualizationSpec:
    totals = ledger.non_host_totals()
    if pid not in totals:
        raise ValueError(f"{pid!r} is not a non-host participant")
    others = [v for k, v in totals.items() if k != pid]
    if not others:
        raise ValueError("self-vs-average chart needs at least two non-host participants")
    mean = sum(others) / len(others)
    bars = (Bar(pid, totals[pid], True), Bar(templates.AVERAGE_LABEL, mean, False))
    return VisualizationSpec(ChartKind.SELF_VS_AVERAGE, bars, ledger.elapsed)


def host_kind(reason: HostReason) -> InterventionKind:
    if reason & HostReason.EXPRESSION:
        return InterventionKind.HOST_EXPRESSION
    return InterventionKind.HOST_INHIBITION


def activate_host(
    reason: HostReason, ledger: SpeakingLedger, host: str, t: int, config: MeetingConfig
) -> tuple[InterventionState, QueuedMessage]:
    label = reason.label
    state = InterventionState(host_kind(reason), host, t, t + config.refresh_interval, reasons=[label])
    msg = QueuedMessage(host, templates.host_message(label), "intervention", t * 1000, build_host_chart(ledger))
    return state, msg


def activate_over(
    over_list: list[str], ledger: SpeakingLedger, t: int, config: MeetingConfig
) -> tuple[list[InterventionState], list[QueuedMessage]]:
    states, queued = [], []
    for pid in over_list:
        try:
            chart = build_self_vs_avg_chart(ledger, pid)
        except ValueError as exc:
            log.info("skipping over-participator intervention for %s: %s", pid, exc)
            continue
        states.append(InterventionState(InterventionKind.OVER_PARTICIPATOR, pid, t, t + config.refresh_interval))
        queued.append(QueuedMessage(pid, templates.over_message(), "intervention", t * 1000, chart))
    return states, queued


def activate(
    activation: InterventionActivation,
    ledger: SpeakingLedger,
    over_list: list[str],
    host: str,
    t: int,
    config: MeetingConfig,
) -> tuple[list[InterventionState], list[QueuedMessage]]:
    """Create intervention states and their first messages at tick ``t`` (seconds)."""
    states: list[InterventionState] = []
    queued: list[QueuedMessage] = []
    if activation.host_intervention:
        state, msg = activate_host(activation.host_reason, ledger, host, t, config)
        states.append(state)
        queued.append(msg)
    if activation.over_participator_intervention:
        more, msgs = activate_over(over_list, ledger, t, config)
        states.extend(more)
        queued.extend(msgs)
    return states, queued


def refresh_due(
    states: list[InterventionState], ledger: SpeakingLedger, t: int, config: MeetingConfig
) -> list[QueuedMessage]:
    queued = []
    for st in states:
        if not st.active or st.stopped or t < st.next_refresh_t:
            continue
        if st.kind is InterventionKind.OVER_PARTICIPATOR:
            msg = QueuedMessage(st.receiver, templates.REFRESH_OVER, "refresh", t * 1000,
                                build_self_vs_avg_chart(ledger, st.receiver))
        else:
            msg = QueuedMessage(st.receiver, templates.REFRESH_HOST, "refresh", t * 1000, build_host_chart(ledger))
        queued.append(msg)
        st.refresh_times.append(t)
        st.next_refresh_t += config.refresh_interval
    return queued


def gate_and_deliver(
    queue: list[QueuedMessage], ledger: SpeakingLedger, t: int, config: MeetingConfig
) -> list[QueuedMessage]:
    """Pop and return, in queue order, messages whose receiver has been quiet long enough at ``t`` ms."""
    gate = config.mic_quiet_gate * 1000
    eligible: dict[str, bool] = {}
    delivered, kept = [], []
    for msg in queue:
        ok = eligible.get(msg.to)
        if ok is None:
            ok = eligible[msg.to] = ledger.quiet_duration(msg.to, t) >= gate
        if ok:
            msg.delivered_t = t
            delivered.append(msg)
        else:
            kept.append(msg)
    queue[:] = kept
    return delivered


def is_stop(text: str) -> bool:
    return text.strip().lower() == "stop"


def handle_stop(
    states: list[InterventionState], queue: list[QueuedMessage], sender: str, text: str, t: int
) -> list[QueuedMessage]:
    """Stop every live intervention aimed at ``sender``. Returns the dropped queued messages."""
    if not is_stop(text):
        return []
    mine = [st for st in states if st.receiver == sender and st.active and not st.stopped]
    if not mine:
        return []
    for st in mine:
        st.stopped = True
        st.active = False
        st.stopped_t = t
    dropped = [m for m in queue if m.to == sender]
    queue[:] = [m for m in queue if m.to != sender]
    return dropped


def forward_feedback(host: str, notes: list[str], t: int) -> list[QueuedMessage]:
    return [QueuedMessage(host, templates.FEEDBACK.format(note=note.strip()), "feedback", t * 1000) for note in notes]
