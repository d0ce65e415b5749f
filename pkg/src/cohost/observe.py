"""Trigger rules for leaving the observation phase, and participation classes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import MeetingConfig, SpeakingLedger


@dataclass(frozen=True)
class RatioImbalance:
    participant: str
    ratio: float
    kind: str = "ratio_imbalance"


@dataclass(frozen=True)
class HalfTime:
    kind: str = "half_time"


TriggerReason = RatioImbalance | HalfTime


def ratio_violators(totals: dict[str, int], config: MeetingConfig) -> list[str]:
    """Non-hosts whose share is strictly above ``ratio_high`` or below ``ratio_low`` times the mean."""
    n = len(totals)
    total = sum(totals.values())
    high = Fraction(config.ratio_high)
    low = Fraction(config.ratio_low)
    # cum > high * total / n  <=>  cum * n > high * total
    return [
        pid
        for pid in sorted(totals)
        if totals[pid] * n > high * total or totals[pid] * n < low * total
    ]


def evaluate_trigger(
    ledger: SpeakingLedger, t: int, config: MeetingConfig, already_asked: bool
) -> TriggerReason | None:
    """Return the reason to enter the Ask phase at tick ``t``, or None."""
    if already_asked:
        return None
    if t >= config.ratio_min_elapsed:
        totals = ledger.non_host_totals()
        violators = ratio_violators(totals, config)
        if violators:
            pid = violators[0]
            ratio = Fraction(totals[pid] * len(totals), sum(totals.values()))
            return RatioImbalance(pid, float(ratio))
    if t >= config.half_time:
        return HalfTime()
    return None


def under_participators(ledger: SpeakingLedger) -> list[str]:
    totals = ledger.non_host_totals()
    avg = ledger.average_nonhost()
    below = [pid for pid in totals if totals[pid] < avg]
    if not below:
        lowest = min(totals.values())
        below = [pid for pid in totals if totals[pid] == lowest]
    return sorted(below, key=lambda pid: (totals[pid], pid))


def over_participators(ledger: SpeakingLedger) -> list[str]:
    totals = ledger.non_host_totals()
    top = min(totals, key=lambda pid: (-totals[pid], pid))
    avg = ledger.average_nonhost()
    extra = sorted(
        (pid for pid in totals if pid != top and totals[pid] > 2 * avg),
        key=lambda pid: (-totals[pid], pid),
    )
    return [top, *extra]
