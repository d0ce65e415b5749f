"""Brute-force recomputation of what the engine should observe.

Nothing here imports engine, ledger or observe code: totals are counted
directly from the speaking intervals and the trigger rules are re-applied by a
plain scan over every tick.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from ..model import Role
from .scenario import Scenario, expand_intervals


@dataclass
class OracleReport:
    participants: list[str]
    table: dict[str, list[int]]  # table[p][t] = seconds spoken by tick t; index 0 is the start
    first_trigger_t: int | None
    reason: dict | None
    under: list[str]
    over: list[str]

    def to_dict(self) -> dict:
        return {
            "participants": self.participants,
            "first_trigger_t": self.first_trigger_t,
            "reason": self.reason,
            "under": self.under,
            "over": self.over,
            "table": self.table,
        }

    @classmethod
    def from_dict(cls, d: dict) -> OracleReport:
        return cls(d["participants"], {k: list(v) for k, v in d["table"].items()}, d["first_trigger_t"],
                   d["reason"], d["under"], d["over"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> OracleReport:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def speaking_ticks(intervals: list[tuple[int, int]], duration: int) -> set[int]:
    """Tick instants ``s`` (seconds) with ``start <= s*1000 < end`` for some interval."""
    ticks: set[int] = set()
    for start, end in intervals:
        first = max(1, math.ceil(start / 1000))
        last = min(duration, math.ceil(end / 1000) - 1)
        ticks.update(range(first, last + 1))
    return ticks


def oracle_cumulative(scenario: Scenario) -> dict[str, list[int]]:
    duration = scenario.config.scheduled_duration
    table = {}
    for pid, ivs in expand_intervals(scenario).items():
        ticks = speaking_ticks(ivs, duration)
        row = [0] * (duration + 1)
        for t in range(1, duration + 1):
            row[t] = row[t - 1] + (1 if t in ticks else 0)
        table[pid] = row
    return dict(sorted(table.items()))


def _scan(scenario: Scenario, table: dict[str, list[int]]):
    cfg = scenario.config
    members = sorted(p.id for p in scenario.participants if p.role is Role.MEMBER)
    n = len(members)
    half = Fraction(cfg.half_time_fraction) * cfg.scheduled_duration
    high, low = Fraction(cfg.ratio_high), Fraction(cfg.ratio_low)
    for t in range(1, cfg.scheduled_duration + 1):
        vals = {m: table[m][t] for m in members}
        mean = Fraction(sum(vals.values()), n)
        if t >= cfg.ratio_min_elapsed:
            hits = [m for m in members if vals[m] > high * mean or vals[m] < low * mean]
            if hits:
                return t, {"kind": "ratio_imbalance", "participant": hits[0], "ratio": float(vals[hits[0]] / mean)}, vals
        if t >= half:
            return t, {"kind": "half_time"}, vals
    return None, None, {}


def oracle_first_trigger(scenario: Scenario, table: dict[str, list[int]] | None = None) -> tuple[int | None, dict | None]:
    table = table if table is not None else oracle_cumulative(scenario)
    t, reason, _ = _scan(scenario, table)
    return t, reason


def classify(vals: dict[str, int]) -> tuple[list[str], list[str]]:
    """Under- and over-participators from non-host totals."""
    n = len(vals)
    total = sum(vals.values())
    under = sorted((m for m in vals if vals[m] * n < total), key=lambda m: (vals[m], m))
    if not under:
        lo = min(vals.values())
        under = sorted(m for m in vals if vals[m] == lo)
    top = sorted(vals, key=lambda m: (-vals[m], m))[0]
    extra = sorted((m for m in vals if m != top and vals[m] * n > 2 * total), key=lambda m: (-vals[m], m))
    return under, [top] + extra


def oracle_report(scenario: Scenario) -> OracleReport:
    table = oracle_cumulative(scenario)
    t, reason, vals = _scan(scenario, table)
    under, over = classify(vals) if vals else ([], [])
    return OracleReport(sorted(table), table, t, reason, under, over)
