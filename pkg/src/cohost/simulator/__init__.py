"""Scenario generation, engine driving, and the independent oracle."""

from .oracle import OracleReport, oracle_cumulative, oracle_first_trigger, oracle_report
from .runner import SimResult, compare, run
from .scenario import (
    Intervals,
    ReplyPolicy,
    ReplyRule,
    Scenario,
    ScenarioError,
    ScenarioParticipant,
    Stochastic,
    expand_intervals,
)

__all__ = [
    "Intervals",
    "OracleReport",
    "ReplyPolicy",
    "ReplyRule",
    "Scenario",
    "ScenarioError",
    "ScenarioParticipant",
    "SimResult",
    "Stochastic",
    "compare",
    "expand_intervals",
    "oracle_cumulative",
    "oracle_first_trigger",
    "oracle_report",
    "run",
]
