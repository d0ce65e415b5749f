"""Deterministic virtual co-host: observe speaking time, ask quiet members, intervene privately."""

from .engine import Engine, finalize, init, step
from .model import MeetingConfig, Participant, Role, Roster, SpeakingLedger

__version__ = "0.1.0"

__all__ = ["Engine", "MeetingConfig", "Participant", "Role", "Roster", "SpeakingLedger", "finalize", "init", "step"]
