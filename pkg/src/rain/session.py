"""Assessment sessions: context capture, norm activation, graded answers.

A session pins one graph snapshot and carries an append-only journal of
context assertions and assessment answers.  All derived state — presences,
current answers, norm statuses, violations — is a fold over the journal, so
replaying a journal reproduces the session exactly.

Presence is three-valued: ``unknown`` entities keep a norm merely
*potentially* active, which is what makes a dynamic questionnaire
meaningful mid-session.  A norm is active only when every gating feature
and stakeholder is present, and inactive as soon as any gate is absent.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from functools import cached_property
from typing import Literal, Union

from .errors import PreconditionError, UnknownEntityError
from .model import AssessmentCriterion, Norm, RainGraph, TestKind

INCOMPLETE: Literal["incomplete"] = "incomplete"
Violation = Union[int, Literal["incomplete"]]


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class Presence(str, Enum):
    PRESENT = "present"
    ABSENT = "absent"
    UNKNOWN = "unknown"


class Outcome(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class Activation(str, Enum):
    INACTIVE = "inactive"
    POTENTIALLY_ACTIVE = "potentially-active"
    ACTIVE = "active"


@dataclass(frozen=True)
class ContextAsserted:
    entity: str
    presence: Presence
    timestamp: str

    kind = "context-asserted"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "entity": self.entity, "presence": self.presence.value, "timestamp": self.timestamp}


@dataclass(frozen=True)
class AnswerRecorded:
    norm: str
    level: int
    outcome: Outcome
    evidence: str | None
    timestamp: str

    kind = "answer-recorded"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "norm": self.norm,
            "level": self.level,
            "outcome": self.outcome.value,
            "evidence": self.evidence,
            "timestamp": self.timestamp,
        }


JournalEvent = Union[ContextAsserted, AnswerRecorded]


def event_from_dict(data: dict) -> JournalEvent:
    if data["kind"] == ContextAsserted.kind:
        return ContextAsserted(entity=data["entity"], presence=Presence(data["presence"]), timestamp=data["timestamp"])
    if data["kind"] == AnswerRecorded.kind:
        return AnswerRecorded(
            norm=data["norm"],
            level=int(data["level"]),
            outcome=Outcome(data["outcome"]),
            evidence=data.get("evidence"),
            timestamp=data["timestamp"],
        )
    raise ValueError(f"unknown journal event kind: {data.get('kind')!r}")


@dataclass(frozen=True)
class NormStatus:
    state: Activation
    violation: Violation | None = None  # only meaningful when active

    def to_dict(self) -> dict:
        data: dict = {"state": self.state.value}
        if self.state is Activation.ACTIVE:
            data["violation"] = self.violation
        return data


@dataclass(frozen=True)
class Session:
    """Immutable snapshot: a graph pin plus the journal that defines the state."""

    id: str
    graph: RainGraph
    journal: tuple[JournalEvent, ...] = ()

    @property
    def revision(self) -> int:
        return len(self.journal)

    @property
    def graph_revision(self) -> int:
        return self.graph.revision

    @cached_property
    def context(self) -> dict[str, Presence]:
        presences: dict[str, Presence] = {}
        for event in self.journal:
            if isinstance(event, ContextAsserted):
                presences[event.entity] = event.presence
        return presences

    @cached_property
    def answers(self) -> dict[tuple[str, int], AnswerRecorded]:
        current: dict[tuple[str, int], AnswerRecorded] = {}
        for event in self.journal:
            if isinstance(event, AnswerRecorded):
                current[(event.norm, event.level)] = event
        return current

    def presence_of(self, entity_id: str) -> Presence:
        return self.context.get(entity_id, Presence.UNKNOWN)


def new_session(session_id: str, graph: RainGraph) -> Session:
    return Session(id=session_id, graph=graph)


def _status_of(norm: Norm, context: dict[str, Presence], answers) -> NormStatus:
    absent = False
    unknown = False
    for gate in norm.gates:
        presence = context.get(gate, Presence.UNKNOWN)
        if presence is Presence.ABSENT:
            absent = True
            break
        if presence is Presence.UNKNOWN:
            unknown = True
    if absent:
        return NormStatus(Activation.INACTIVE)
    if unknown:
        return NormStatus(Activation.POTENTIALLY_ACTIVE)
    return NormStatus(Activation.ACTIVE, violation=_violation_of(norm, answers))


def _violation_of(norm: Norm, answers) -> Violation:
    worst = 0
    for criterion in norm.criteria:
        answer = answers.get((norm.id, criterion.level))
        if answer is None:
            return INCOMPLETE
        if answer.outcome is Outcome.FAIL:
            worst = max(worst, criterion.level)
    return worst


def active_norms(session: Session) -> dict[str, NormStatus]:
    """Status of every norm; a deterministic function of (graph, context, answers)."""
    context = session.context
    answers = session.answers
    return {norm.id: _status_of(norm, context, answers) for norm in session.graph.norms}


def norm_status(session: Session, norm_id: str) -> NormStatus:
    norm = session.graph.norms_by_id.get(norm_id)
    if norm is None:
        raise UnknownEntityError(f"unknown norm: {norm_id}", ids=(norm_id,))
    return _status_of(norm, session.context, session.answers)


def assert_context(session: Session, entity_id: str, presence: Presence, timestamp: str | None = None) -> Session:
    """Record a presence; re-assertion supersedes, the journal keeps both."""
    graph = session.graph
    if entity_id not in graph.features_by_id and entity_id not in graph.stakeholders_by_id:
        raise UnknownEntityError(f"unknown context entity: {entity_id}", ids=(entity_id,))
    event = ContextAsserted(entity=entity_id, presence=Presence(presence), timestamp=timestamp or utc_now_iso())
    return Session(id=session.id, graph=session.graph, journal=session.journal + (event,))


def record_answer(
    session: Session,
    norm_id: str,
    level: int,
    outcome: Outcome,
    evidence: str | None = None,
    timestamp: str | None = None,
) -> Session:
    """Record a pass/fail for one criterion of an active norm."""
    status = norm_status(session, norm_id)
    if status.state is not Activation.ACTIVE:
        raise PreconditionError(
            f"norm {norm_id} is {status.state.value}; only active norms can be assessed",
            ids=(norm_id,),
        )
    norm = session.graph.norms_by_id[norm_id]
    if norm.criterion_at(level) is None:
        raise PreconditionError(
            f"norm {norm_id} has no criterion at level {level}", ids=(norm_id,)
        )
    event = AnswerRecorded(
        norm=norm_id,
        level=level,
        outcome=Outcome(outcome),
        evidence=evidence,
        timestamp=timestamp or utc_now_iso(),
    )
    return Session(id=session.id, graph=session.graph, journal=session.journal + (event,))


def norm_violation(session: Session, norm_id: str) -> Violation:
    """Violation of an active norm: worst failed level, or incomplete."""
    status = norm_status(session, norm_id)
    if status.state is not Activation.ACTIVE:
        raise PreconditionError(
            f"norm {norm_id} is {status.state.value}; violations apply to active norms",
            ids=(norm_id,),
        )
    assert status.violation is not None
    return status.violation


def activated_values(session: Session) -> set[str]:
    """Values touched by any norm that is active or still potentially active."""
    statuses = active_norms(session)
    touched: set[str] = set()
    for norm in session.graph.norms:
        if statuses[norm.id].state in (Activation.ACTIVE, Activation.POTENTIALLY_ACTIVE):
            touched.update(norm.values)
    return touched


@dataclass(frozen=True)
class Question:
    entity_id: str
    entity_kind: str  # "feature" or "stakeholder"
    question: str
    gated_norms: int

    def to_dict(self) -> dict:
        return {
            "entity": self.entity_id,
            "kind": self.entity_kind,
            "question": self.question,
            "gated_norms": self.gated_norms,
        }


def next_questions(session: Session) -> list[Question]:
    """Unknown entities that still gate undecided norms, most impactful first.

    Ordering: number of potentially-active norms the entity gates,
    descending; ties break by id.  Empty exactly when every norm is decided
    active or inactive.
    """
    statuses = active_norms(session)
    graph = session.graph
    counts: dict[str, int] = {}
    for norm in graph.norms:
        if statuses[norm.id].state is not Activation.POTENTIALLY_ACTIVE:
            continue
        for gate in norm.gates:
            if session.presence_of(gate) is Presence.UNKNOWN:
                counts[gate] = counts.get(gate, 0) + 1
    questions = []
    for entity_id in sorted(counts, key=lambda e: (-counts[e], e)):
        feature = graph.features_by_id.get(entity_id)
        if feature is not None:
            questions.append(Question(entity_id, "feature", feature.question, counts[entity_id]))
            continue
        stakeholder = graph.stakeholders_by_id[entity_id]
        questions.append(Question(entity_id, "stakeholder", stakeholder.question, counts[entity_id]))
    return questions


@dataclass(frozen=True)
class AssessmentItem:
    norm_id: str
    criterion: AssessmentCriterion

    def to_dict(self) -> dict:
        return {
            "norm": self.norm_id,
            "level": self.criterion.level,
            "kind": self.criterion.kind.value,
            "prompt": self.criterion.prompt,
            "fail_on": self.criterion.fail_on.value,
        }


def assessment_items(session: Session, kind: TestKind | str | None = None) -> list[AssessmentItem]:
    """Unanswered criteria of active norms, optionally filtered by test kind.

    Monitor-kind items are interface stubs: their pass/fail result must be
    supplied externally, through the same answer-recording path.
    """
    wanted = TestKind(kind) if kind is not None else None
    statuses = active_norms(session)
    answers = session.answers
    items = []
    for norm in session.graph.norms:
        if statuses[norm.id].state is not Activation.ACTIVE:
            continue
        for criterion in norm.criteria:
            if (norm.id, criterion.level) in answers:
                continue
            if wanted is not None and criterion.kind is not wanted:
                continue
            items.append(AssessmentItem(norm.id, criterion))
    return items
