from __future__ import annotations

import random

import pytest

from cohost.model import MeetingConfig, Participant, Role, Roster, SpeakingLedger, VoiceEvent
from cohost.simulator import Intervals, ReplyPolicy, ReplyRule, Scenario, ScenarioParticipant, Stochastic

ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, status, title in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {n}: {status} - {title}")


def make_roster(members=("A", "B", "C"), host="H") -> Roster:
    return Roster([Participant(host, Role.HOST), *(Participant(m) for m in members)])


def ledger_with(totals: dict[str, int], host: str = "H", host_total: int = 0) -> SpeakingLedger:
    """A ledger whose non-host totals are exactly ``totals``."""
    ledger = SpeakingLedger(make_roster(tuple(totals), host))
    ledger.cumulative.update(totals)
    ledger.cumulative[host] = host_total
    ledger.elapsed = max([host_total, *totals.values()])
    ledger.last_event_ms = ledger.elapsed * 1000
    return ledger


def drive(ledger: SpeakingLedger, intervals: dict[str, list[tuple[int, int]]], until: int) -> SpeakingLedger:
    """Feed voice transitions and ticks 1..until through the ledger in stream order."""
    events = []
    for pid, ivs in intervals.items():
        for s, e in ivs:
            events.append((s, pid, True))
            events.append((e, pid, False))
    events.sort(key=lambda x: (x[0], x[2]))
    i = 0
    for t in range(1, until + 1):
        while i < len(events) and events[i][0] <= t * 1000:
            s, pid, active = events[i]
            ledger.ingest_voice(VoiceEvent(pid, active, s))
            i += 1
        ledger.sample_tick(t)
    return ledger


REPLIES = ["yes", "no", "y", "n", "maybe", " YES ", "No", "idk", "please slow down", "stop"]


def random_scenario(seed: int, short: bool = False) -> Scenario:
    """Seeded meeting with a mix of stochastic and explicit (possibly overlapping) speakers."""
    rng = random.Random(seed)
    if short:
        duration = rng.randrange(300, 1201)
        config = MeetingConfig(
            duration,
            ratio_min_elapsed=rng.randrange(30, duration),
            refresh_interval=rng.choice([30, 60, 120, 240]),
        )
    else:
        duration = rng.choice([600, 900, 1200, 1800, 2400])
        config = MeetingConfig(duration)
    n = rng.randrange(2, 7)
    ids = ["host"] + [f"m{i}" for i in range(n)]
    rng.shuffle(ids)
    parts = []
    for pid in ids:
        role = Role.HOST if pid == "host" else Role.MEMBER
        if rng.random() < 0.7:
            script = Stochastic(
                round(rng.uniform(0.0, 4.0), 3),
                round(rng.uniform(2.0, 30.0), 3),
                round(rng.choice([0.0, rng.uniform(0.1, 5.0)]), 3),
            )
        else:
            ivs, t = [], rng.randrange(0, 20_000)
            while t < duration * 1000:
                length = rng.randrange(500, 60_000)
                end = min(t + length, duration * 1000)
                ivs.append((t, end))
                t = end + rng.randrange(0, 90_000)
            script = Intervals(tuple(ivs))
        rules = tuple(
            ReplyRule(
                rng.choice([1, 2, 3, 1, 2, "chart", "speaking time"]),
                rng.choice(REPLIES),
                rng.randrange(0, 15_000),
            )
            for _ in range(rng.randrange(0, 5))
        )
        policy = ReplyPolicy(rules, rng.choice(["ignore", "echo-no"]))
        parts.append(ScenarioParticipant(pid, role, script, policy))
    return Scenario(config, tuple(parts), rng.randrange(2**31))


@pytest.fixture
def roster():
    return make_roster()
