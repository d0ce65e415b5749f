"""Core meeting vocabulary: roster, configuration, raw events and the speaking ledger.

Timestamps on events are integer milliseconds since meeting start. Ledger
totals are whole seconds: a participant accrues one second at tick ``t`` when
their latest voice state at instant ``t * 1000`` ms is active.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping


class CohostError(Exception):
    """Base class for every error raised by the engine."""


class ConfigError(CohostError):
    pass


class RosterError(CohostError):
    pass


class ClockError(CohostError):
    pass


class Role(str, enum.Enum):
    HOST = "host"
    MEMBER = "member"
    COHOST = "cohost"


DEFAULT_COHOST_ID = "cohost"


@dataclass(frozen=True)
class MeetingConfig:
    scheduled_duration: int
    ratio_min_elapsed: int = 480
    ratio_high: float = 2.0
    ratio_low: float = 0.5
    half_time_fraction: float = 0.5
    refresh_interval: int = 240
    mic_quiet_gate: int = 5
    tick: int = 1

    def __post_init__(self) -> None:
        for name in ("scheduled_duration", "ratio_min_elapsed", "refresh_interval", "mic_quiet_gate"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer number of seconds, got {value!r}")
        if not (self.ratio_high > 1 > self.ratio_low > 0):
            raise ConfigError(
                f"need ratio_high > 1 > ratio_low > 0, got {self.ratio_high!r} / {self.ratio_low!r}"
            )
        if not (0 < self.half_time_fraction < 1):
            raise ConfigError(f"half_time_fraction must lie in (0, 1), got {self.half_time_fraction!r}")
        if self.tick != 1:
            raise ConfigError("tick is fixed at 1 second")

    @property
    def half_time(self) -> Fraction:
        return Fraction(self.half_time_fraction) * self.scheduled_duration

    def to_dict(self) -> dict:
        return {
            "scheduled_duration": self.scheduled_duration,
            "ratio_min_elapsed": self.ratio_min_elapsed,
            "ratio_high": self.ratio_high,
            "ratio_low": self.ratio_low,
            "half_time_fraction": self.half_time_fraction,
            "refresh_interval": self.refresh_interval,
            "mic_quiet_gate": self.mic_quiet_gate,
            "tick": self.tick,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> MeetingConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "scheduled_duration" not in data:
            raise ConfigError("config.scheduled_duration is required")
        return cls(**data)


@dataclass(frozen=True)
class Participant:
    id: str
    role: Role = Role.MEMBER

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise RosterError("participant id must be a non-empty string")
        object.__setattr__(self, "role", Role(self.role))


class Roster:
    """Ordered set of participants with exactly one host and exactly one co-host.

    A roster supplied without a co-host entry gets one named ``cohost``.
    """

    def __init__(self, participants: Iterable[Participant]) -> None:
        members = list(participants)
        ids = [p.id for p in members]
        if len(set(ids)) != len(ids):
            raise RosterError(f"duplicate participant ids in roster: {ids}")
        hosts = [p for p in members if p.role is Role.HOST]
        if len(hosts) != 1:
            raise RosterError(f"roster needs exactly one host, found {len(hosts)}")
        cohosts = [p for p in members if p.role is Role.COHOST]
        if len(cohosts) > 1:
            raise RosterError("roster may name at most one co-host")
        if not cohosts:
            if DEFAULT_COHOST_ID in ids:
                raise RosterError(f"id {DEFAULT_COHOST_ID!r} is reserved for the co-host")
            members.append(Participant(DEFAULT_COHOST_ID, Role.COHOST))
        self.participants: tuple[Participant, ...] = tuple(members)
        self.roles: dict[str, Role] = {p.id: p.role for p in members}
        self.host: str = hosts[0].id
        self.cohost: str = next(p.id for p in members if p.role is Role.COHOST)
        # sorted ids give the deterministic tie-break order
        self.humans: tuple[str, ...] = tuple(sorted(p.id for p in members if p.role is not Role.COHOST))
        self.non_hosts: tuple[str, ...] = tuple(sorted(p.id for p in members if p.role is Role.MEMBER))
        if not self.non_hosts:
            raise ConfigError("roster needs at least one non-host member")

    def __contains__(self, pid: object) -> bool:
        return pid in self.roles

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Roster) and self.participants == other.participants

    def __repr__(self) -> str:
        return f"Roster({list(self.participants)!r})"

    def to_list(self) -> list[dict]:
        return [{"id": p.id, "role": p.role.value} for p in self.participants]

    @classmethod
    def from_list(cls, items: Iterable[Mapping]) -> Roster:
        try:
            return cls(Participant(item["id"], Role(item["role"])) for item in items)
        except (KeyError, ValueError, TypeError) as exc:
            raise RosterError(f"malformed roster entry: {exc}") from exc


@dataclass(frozen=True)
class VoiceEvent:
    participant: str
    active: bool
    t: int  # ms


@dataclass(frozen=True)
class ChatEvent:
    sender: str
    text: str
    t: int  # ms

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("chat text must be non-empty after trimming")


@dataclass
class SpeakingLedger:
    """Per-participant cumulative speaking seconds plus current voice state."""

    roster: Roster
    cumulative: dict[str, int] = field(default_factory=dict)
    last_active_end: dict[str, int | None] = field(default_factory=dict)
    active: set[str] = field(default_factory=set)
    elapsed: int = 0
    last_event_ms: int = 0

    def __post_init__(self) -> None:
        for pid in self.roster.roles:
            self.cumulative.setdefault(pid, 0)
            self.last_active_end.setdefault(pid, None)

    def is_active(self, pid: str) -> bool:
        return pid in self.active

    def _check(self, pid: str) -> None:
        if pid not in self.roster:
            raise RosterError(f"unknown participant {pid!r}")

    def ingest_voice(self, ev: VoiceEvent) -> SpeakingLedger:
        self._check(ev.participant)
        if self.roster.roles[ev.participant] is Role.COHOST:
            raise RosterError("the co-host has no voice channel")
        if ev.t < self.last_event_ms:
            raise ClockError(f"voice event at {ev.t} ms precedes last processed time {self.last_event_ms} ms")
        self.last_event_ms = ev.t
        pid = ev.participant
        if ev.active:
            self.active.add(pid)
        elif pid in self.active:
            self.active.discard(pid)
            self.last_active_end[pid] = ev.t
        return self

    def sample_tick(self, t: int) -> SpeakingLedger:
        if t != self.elapsed + 1:
            raise ClockError(f"tick {t} is not consecutive (elapsed {self.elapsed})")
        if t * 1000 < self.last_event_ms:
            raise ClockError(f"tick {t} precedes last processed time {self.last_event_ms} ms")
        for pid in self.active:
            self.cumulative[pid] += 1
        self.elapsed = t
        self.last_event_ms = t * 1000
        return self

    def cumulative_of(self, pid: str) -> int:
        self._check(pid)
        return self.cumulative[pid]

    def non_host_totals(self) -> dict[str, int]:
        return {pid: self.cumulative[pid] for pid in self.roster.non_hosts}

    def average_nonhost(self) -> Fraction:
        totals = self.non_host_totals()
        if not totals:
            raise ConfigError("average undefined without non-host participants")
        return Fraction(sum(totals.values()), len(totals))

    def quiet_duration(self, pid: str, t: int) -> int:
        """Milliseconds since ``pid`` last stopped speaking, as seen at ``t`` ms."""
        self._check(pid)
        if pid in self.active:
            return 0
        end = self.last_active_end[pid]
        return t if end is None else t - end

    def snapshot(self) -> dict[str, int]:
        return dict(self.cumulative)


def new_ledger(roster: Roster) -> SpeakingLedger:
    return SpeakingLedger(roster)


def ingest_voice(ledger: SpeakingLedger, ev: VoiceEvent) -> SpeakingLedger:
    return ledger.ingest_voice(ev)


def sample_tick(ledger: SpeakingLedger, t: int) -> SpeakingLedger:
    return ledger.sample_tick(t)


def cumulative(ledger: SpeakingLedger, pid: str) -> int:
    return ledger.cumulative_of(pid)


def average_nonhost(ledger: SpeakingLedger) -> Fraction:
    return ledger.average_nonhost()


def quiet_duration(ledger: SpeakingLedger, pid: str, t: int) -> int:
    return ledger.quiet_duration(pid, t)
