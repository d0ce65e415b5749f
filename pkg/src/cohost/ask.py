"""The three-question private dialogue with under-participators."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable

from . import templates

log = logging.getLogger(__name__)

YES_WORDS = frozenset({"yes", "y"})
NO_WORDS = frozenset({"no", "n"})


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class FreeText:
    text: str


class Stage(enum.Enum):
    AWAITING_Q1 = "awaiting_q1"
    AWAITING_Q2 = "awaiting_q2"
    AWAITING_Q3 = "awaiting_q3"
    DONE = "done"
    SILENT = "silent"

    @property
    def question(self) -> int | None:
        return _STAGE_QUESTION.get(self)

    @property
    def open(self) -> bool:
        return self in _STAGE_QUESTION


_STAGE_QUESTION = {Stage.AWAITING_Q1: 1, Stage.AWAITING_Q2: 2, Stage.AWAITING_Q3: 3}
_NEXT_STAGE = {Stage.AWAITING_Q1: Stage.AWAITING_Q2, Stage.AWAITING_Q2: Stage.AWAITING_Q3, Stage.AWAITING_Q3: Stage.DONE}


class HostReason(enum.Flag):
    NONE = 0
    EXPRESSION = 1
    INHIBITION = 2
    BOTH = 3

    @property
    def label(self) -> str:
        return {0: "none", 1: "expression", 2: "inhibition", 3: "both"}[self.value]


@dataclass(frozen=True)
class InterventionActivation:
    host_reason: HostReason = HostReason.NONE
    over_participator_intervention: bool = False
    feedback_notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.over_participator_intervention and not self.host_intervention:
            raise ValueError("over-participator intervention always comes with the host intervention")

    @property
    def host_intervention(self) -> bool:
        return bool(self.host_reason)


@dataclass(frozen=True)
class Prompt:
    """An outgoing dialogue message, not yet stamped with a time."""

    to: str
    text: str
    kind: str
    question: int | None = None


@dataclass
class DialogueSession:
    participant: str
    stage: Stage = Stage.AWAITING_Q1
    answers: dict[int, Answer | FreeText] = field(default_factory=dict)

    def activation(self) -> InterventionActivation:
        reason = HostReason.NONE
        if self.answers.get(1) is Answer.NO:
            reason |= HostReason.EXPRESSION
        over = self.answers.get(2) is Answer.YES
        if over:
            reason |= HostReason.INHIBITION
        q3 = self.answers.get(3)
        notes = (q3.text,) if isinstance(q3, FreeText) else ()
        return InterventionActivation(reason, over, notes)


def question_prompt(pid: str, index: int, preamble: bool = False) -> Prompt:
    text = templates.QUESTIONS[index]
    if preamble:
        text = f"{templates.ASK_PREAMBLE}\n{text}"
    return Prompt(pid, text, "question", index)


def open_sessions(targets: Iterable[str]) -> tuple[list[DialogueSession], list[Prompt]]:
    sessions = [DialogueSession(pid) for pid in targets]
    if not sessions:
        log.warning("no under-participators to ask")
    return sessions, [question_prompt(s.participant, 1, preamble=True) for s in sessions]


def parse_reply(stage: Stage, text: str) -> Answer | FreeText:
    if not stage.open:
        raise ValueError(f"no question pending in stage {stage.value}")
    word = text.strip().lower()
    if not word:
        return Answer.UNSUPPORTED
    if stage is Stage.AWAITING_Q3:
        return Answer.NO if word in NO_WORDS else FreeText(text)
    if word in YES_WORDS:
        return Answer.YES
    if word in NO_WORDS:
        return Answer.NO
    return Answer.UNSUPPORTED


def advance(
    session: DialogueSession, answer: Answer | FreeText
) -> tuple[DialogueSession, list[Prompt], InterventionActivation]:
    """Record ``answer`` and return the session, replies to send, and its activation so far.

    Unsupported input re-prompts with the current question and leaves the stage alone.
    """
    if not session.stage.open:
        raise ValueError(f"session for {session.participant} is {session.stage.value}")
    pid = session.participant
    index = session.stage.question
    if answer is Answer.UNSUPPORTED:
        tpl = templates.NOT_UNDERSTOOD_FEEDBACK if index == 3 else templates.NOT_UNDERSTOOD_YES_NO
        prompt = Prompt(pid, tpl.format(question=templates.QUESTIONS[index]), "reprompt", index)
        return session, [prompt], session.activation()
    if isinstance(answer, FreeText) and index != 3:
        raise ValueError("free text is only a valid answer to question 3")

    session.answers[index] = answer
    session.stage = _NEXT_STAGE[session.stage]
    activation = session.activation()
    if session.stage is Stage.DONE:
        text = templates.CLOSE_WILL_INTERVENE if activation.host_intervention else templates.CLOSE_ALL_CLEAR
        if activation.feedback_notes:
            text += templates.CLOSE_FEEDBACK_SUFFIX
        out = [Prompt(pid, text, "close")]
    else:
        out = [Prompt(pid, templates.ACK, "ack"), question_prompt(pid, session.stage.question)]
    return session, out, activation


def aggregate(activations: Iterable[InterventionActivation]) -> InterventionActivation:
    reason = HostReason.NONE
    over = False
    notes: list[str] = []
    for act in activations:
        reason |= act.host_reason
        over = over or act.over_participator_intervention
        notes.extend(act.feedback_notes)
    return InterventionActivation(reason, over, tuple(notes))
