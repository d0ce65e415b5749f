"""Scenario files: scripted or seeded meetings used to drive and check the engine.

Schema (version 1), JSON::

    {
      "version": 1,
      "seed": 7,
      "config": {"scheduled_duration": 1800, ...},        # MeetingConfig fields
      "participants": [
        {
          "id": "A",
          "role": "member",                                 # host | member
          "speak_script": {"intervals": [[0, 3200], ...]}   # [start_ms, end_ms)
                       | {"turn_rate": 2.0,                 # turns per minute
                          "turn_length_mean": 8.0,          # seconds
                          "talkativeness_weight": 1.0},
          "reply_policy": {
            "rules": [{"match": 1 | "<regex>", "reply_text": "no", "delay_ms": 2000}],
            "default": "ignore" | "echo-no"
          }
        }
      ]
    }

Stochastic scripts are expanded with Python's ``random.Random(seed)``
(MT19937, seeded through ``init_by_array``) and only ever call ``random()``,
the 53-bit ``genrand_res53`` draw, so the expansion below can be reproduced
from the reference MT19937 implementation. One draw sequence is shared by all
stochastic speakers; turns never overlap:

    R = sum(turn_rate_i) / 60                 # turns per second
    loop:
        cursor += -ln(1 - u1) / R             # gap before the next turn (s)
        pick i with probability w_i / sum(w), w_i = turn_rate_i * talkativeness_weight_i,
            by scanning cumulative weights in participant order against u2 * sum(w)
        length = -ln(1 - u3) * turn_length_mean_i
        interval [floor(cursor*1000), floor((cursor+length)*1000)), clipped to the meeting
        cursor += length
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from ..model import ConfigError, MeetingConfig, Participant, Role, Roster

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Intervals:
    intervals: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {"intervals": [list(iv) for iv in self.intervals]}


@dataclass(frozen=True)
class Stochastic:
    turn_rate: float
    turn_length_mean: float
    talkativeness_weight: float = 1.0

    def to_dict(self) -> dict:
        return {
            "turn_rate": self.turn_rate,
            "turn_length_mean": self.turn_length_mean,
            "talkativeness_weight": self.talkativeness_weight,
        }


SpeakScript = Union[Intervals, Stochastic]


@dataclass(frozen=True)
class ReplyRule:
    match: int | str
    reply_text: str
    delay_ms: int = 0

    def to_dict(self) -> dict:
        return {"match": self.match, "reply_text": self.reply_text, "delay_ms": self.delay_ms}


@dataclass(frozen=True)
class ReplyPolicy:
    rules: tuple[ReplyRule, ...] = ()
    default: str = "ignore"

    def to_dict(self) -> dict:
        return {"rules": [r.to_dict() for r in self.rules], "default": self.default}


@dataclass(frozen=True)
class ScenarioParticipant:
    id: str
    role: Role = Role.MEMBER
    speak_script: SpeakScript = field(default_factory=Intervals)
    reply_policy: ReplyPolicy = field(default_factory=ReplyPolicy)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "role": self.role.value,
            "speak_script": self.speak_script.to_dict(),
            "reply_policy": self.reply_policy.to_dict(),
        }


@dataclass(frozen=True)
class Scenario:
    config: MeetingConfig
    participants: tuple[ScenarioParticipant, ...]
    seed: int = 0

    def __post_init__(self) -> None:
        validate(self)

    @property
    def roster(self) -> Roster:
        return Roster(Participant(p.id, p.role) for p in self.participants)

    def with_seed(self, seed: int) -> Scenario:
        return Scenario(self.config, self.participants, seed)

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "seed": self.seed,
            "config": self.config.to_dict(),
            "participants": [p.to_dict() for p in self.participants],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> Scenario:
        try:
            version = data.get("version")
            if version != SCHEMA_VERSION:
                raise ScenarioError(f"unsupported scenario version {version!r}")
            config = MeetingConfig.from_dict(data["config"])
            parts = tuple(_participant_from_dict(p) for p in data["participants"])
            seed = data.get("seed", 0)
            if isinstance(seed, bool) or not isinstance(seed, int):
                raise ScenarioError(f"seed must be an integer, got {seed!r}")
            return cls(config, parts, seed)
        except ScenarioError:
            raise
        except (KeyError, TypeError, ValueError, ConfigError) as exc:
            raise ScenarioError(f"invalid scenario: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> Scenario:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def _participant_from_dict(d: dict) -> ScenarioParticipant:
    script_d = d.get("speak_script", {"intervals": []})
    if "intervals" in script_d:
        script: SpeakScript = Intervals(tuple((int(s), int(e)) for s, e in script_d["intervals"]))
    else:
        script = Stochastic(
            float(script_d["turn_rate"]),
            float(script_d["turn_length_mean"]),
            float(script_d.get("talkativeness_weight", 1.0)),
        )
    policy_d = d.get("reply_policy", {})
    rules = tuple(
        ReplyRule(r["match"], r["reply_text"], int(r.get("delay_ms", 0))) for r in policy_d.get("rules", [])
    )
    return ScenarioParticipant(d["id"], Role(d.get("role", "member")), script, ReplyPolicy(rules, policy_d.get("default", "ignore")))


def validate(sc: Scenario) -> None:
    hosts = [p for p in sc.participants if p.role is Role.HOST]
    if len(hosts) != 1:
        raise ScenarioError(f"scenario needs exactly one host, found {len(hosts)}")
    if any(p.role is Role.COHOST for p in sc.participants):
        raise ScenarioError("the co-host is supplied by the engine, not the scenario")
    ids = [p.id for p in sc.participants]
    if len(set(ids)) != len(ids):
        raise ScenarioError("duplicate participant ids")
    end = sc.config.scheduled_duration * 1000
    for p in sc.participants:
        script = p.speak_script
        if isinstance(script, Intervals):
            prev = None
            for s, e in sorted(script.intervals):
                if not (0 <= s < e <= end):
                    raise ScenarioError(f"{p.id}: interval [{s}, {e}) outside [0, {end}] or empty")
                if prev is not None and s < prev:
                    raise ScenarioError(f"{p.id}: overlapping intervals")
                prev = e
        else:
            if script.turn_rate < 0 or script.turn_length_mean <= 0 or script.talkativeness_weight < 0:
                raise ScenarioError(f"{p.id}: stochastic script needs turn_rate >= 0, turn_length_mean > 0, weight >= 0")
        if p.reply_policy.default not in ("ignore", "echo-no"):
            raise ScenarioError(f"{p.id}: reply default must be 'ignore' or 'echo-no'")
        for r in p.reply_policy.rules:
            if r.delay_ms < 0:
                raise ScenarioError(f"{p.id}: reply delay must be >= 0")
            if isinstance(r.match, bool) or not isinstance(r.match, (int, str)):
                raise ScenarioError(f"{p.id}: rule match must be a question index or a pattern")
            if isinstance(r.match, int) and r.match not in (1, 2, 3):
                raise ScenarioError(f"{p.id}: question index must be 1, 2 or 3")
            if not r.reply_text.strip():
                raise ScenarioError(f"{p.id}: reply_text must be non-empty")


def expand_intervals(sc: Scenario) -> dict[str, list[tuple[int, int]]]:
    """Speaking intervals ``[start_ms, end_ms)`` per participant, stochastic scripts drawn from the seed."""
    out = {p.id: sorted(p.speak_script.intervals) for p in sc.participants if isinstance(p.speak_script, Intervals)}
    stochastic = [p for p in sc.participants if isinstance(p.speak_script, Stochastic)]
    for p in stochastic:
        out[p.id] = []
    total_rate = sum(p.speak_script.turn_rate for p in stochastic) / 60.0
    weights = [p.speak_script.turn_rate * p.speak_script.talkativeness_weight for p in stochastic]
    total_w = sum(weights)
    if total_rate <= 0 or total_w <= 0:
        return out
    rng = random.Random(sc.seed)
    end_s = sc.config.scheduled_duration
    cursor = 0.0
    while True:
        cursor += -math.log(1.0 - rng.random()) / total_rate
        if cursor >= end_s:
            break
        pick = rng.random() * total_w
        acc = 0.0
        chosen = len(stochastic) - 1
        for i, w in enumerate(weights):
            acc += w
            if pick < acc:
                chosen = i
                break
        p = stochastic[chosen]
        length = -math.log(1.0 - rng.random()) * p.speak_script.turn_length_mean
        start = math.floor(cursor * 1000)
        stop = min(math.floor((cursor + length) * 1000), end_s * 1000)
        if stop > start:
            out[p.id].append((start, stop))
        cursor += length
    return out
