"""Drive the engine through a scenario and diff the outcome against the oracle."""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass, field

from ..engine import Chat, DirectMessage, Engine, InputEvent, MeetingEnd, MeetingReport, MeetingStart, OutputAction, Tick, Voice
from .oracle import OracleReport
from .scenario import Scenario, expand_intervals

# same-millisecond ordering: voice changes, then chat
_VOICE, _CHAT = 0, 1
_ANSWERABLE = ("question", "reprompt")


@dataclass
class SimResult:
    scenario: Scenario
    events: list[InputEvent]
    actions: list[OutputAction]
    report: MeetingReport
    table: dict[str, list[int]] = field(default_factory=dict)

    def summary(self) -> dict:
        rep = self.report
        return {
            "table": self.table,
            "trigger_t": rep.trigger_t,
            "reason": rep.trigger_reason,
            "under": rep.under_participators,
            "over": rep.over_participators,
        }


def merge_touching(intervals: list[tuple[int, int]]) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for s, e in sorted(intervals):
        if merged and s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    return [(s, e) for s, e in merged]


class _Replies:
    def __init__(self, scenario: Scenario) -> None:
        self.policies = {p.id: p.reply_policy for p in scenario.participants}
        self.used: dict[str, set[int]] = {p.id: set() for p in scenario.participants}

    def respond(self, msg: DirectMessage) -> tuple[str, int] | None:
        policy = self.policies.get(msg.to)
        if policy is None:
            return None
        used = self.used[msg.to]
        for i, rule in enumerate(policy.rules):
            if i in used:
                continue
            if isinstance(rule.match, int):
                hit = msg.kind in _ANSWERABLE and msg.question == rule.match
            else:
                hit = re.search(rule.match, msg.text) is not None
            if hit:
                used.add(i)
                return rule.reply_text, rule.delay_ms
        if policy.default == "echo-no" and msg.kind in _ANSWERABLE:
            return "no", 0
        return None


def run(scenario: Scenario, seed: int | None = None, record_table: bool = True) -> SimResult:
    if seed is not None:
        scenario = scenario.with_seed(seed)
    duration = scenario.config.scheduled_duration
    seq = itertools.count()
    pending: list[tuple[int, int, int, InputEvent]] = []
    for pid, ivs in expand_intervals(scenario).items():
        for s, e in merge_touching(ivs):
            heapq.heappush(pending, (s, _VOICE, next(seq), Voice(pid, True, s)))
            heapq.heappush(pending, (e, _VOICE, next(seq), Voice(pid, False, e)))

    engine = Engine()
    replies = _Replies(scenario)
    events: list[InputEvent] = []
    actions: list[OutputAction] = []
    humans = sorted(p.id for p in scenario.participants)
    table = {pid: [0] for pid in humans} if record_table else {}

    def feed(ev: InputEvent) -> None:
        events.append(ev)
        out = engine.feed(ev)
        actions.extend(out)
        for a in out:
            if isinstance(a, DirectMessage):
                r = replies.respond(a)
                if r is not None:
                    text, delay = r
                    t_ms = a.t_ms + delay
                    heapq.heappush(pending, (t_ms, _CHAT, next(seq), Chat(a.to, text, t_ms)))

    def drain(until_ms: int) -> None:
        while pending and pending[0][0] <= until_ms:
            feed(heapq.heappop(pending)[3])

    feed(MeetingStart(scenario.config, scenario.roster))
    cumulative = engine.state.ledger.cumulative
    for t in range(1, duration + 1):
        drain(t * 1000)
        feed(Tick(t))
        if record_table:
            for pid in humans:
                table[pid].append(cumulative[pid])
    drain(duration * 1000)
    feed(MeetingEnd(duration * 1000))
    return SimResult(scenario, events, actions, engine.report(), table)


def _first_table_divergence(mine: dict[str, list[int]], theirs: dict[str, list[int]]) -> str | None:
    pids = sorted(set(mine) | set(theirs))
    missing = [p for p in pids if p not in mine or p not in theirs]
    if missing:
        return f"cumulative: participants missing from one side: {missing}"
    best = None
    for pid in pids:
        a, b = mine[pid], theirs[pid]
        for t in range(max(len(a), len(b))):
            va = a[t] if t < len(a) else None
            vb = b[t] if t < len(b) else None
            if va != vb:
                if best is None or (t, pid) < best[:2]:
                    best = (t, pid, va, vb)
                break
    if best is None:
        return None
    t, pid, va, vb = best
    return f"cumulative: first divergence at t={t} for {pid}: engine {va}, oracle {vb}"


def _set_diff(name: str, mine: list[str], theirs: list[str]) -> str | None:
    if mine == theirs:
        return None
    only_e = sorted(set(mine) - set(theirs))
    only_o = sorted(set(theirs) - set(mine))
    if not only_e and not only_o:
        return f"{name}: same members, different order: engine {mine}, oracle {theirs}"
    return f"{name}: engine-only {only_e}, oracle-only {only_o}"


def compare(sim: SimResult | dict, oracle: OracleReport) -> list[str]:
    """Divergences between an engine run and the oracle; an empty list means they agree."""
    s = sim.summary() if isinstance(sim, SimResult) else sim
    problems = []
    if s.get("table"):
        diff = _first_table_divergence(s["table"], oracle.table)
        if diff:
            problems.append(diff)
    if s["trigger_t"] != oracle.first_trigger_t:
        problems.append(f"trigger time: engine {s['trigger_t']}, oracle {oracle.first_trigger_t}")
    if s["reason"] != oracle.reason:
        problems.append(f"trigger reason: engine {s['reason']}, oracle {oracle.reason}")
    for name in ("under", "over"):
        diff = _set_diff(name, s[name], getattr(oracle, name))
        if diff:
            problems.append(diff)
    return problems
