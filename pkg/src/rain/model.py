"""Core data model: the contextualized norms graph and its constituents.

A graph holds five plain sets — values, stakeholders, features, norms, and
derived norm contexts — plus the maturity scale, the reviewed-intersection
ledger, and the ids of merged policies.  Graph instances are immutable
snapshots; every mutating operation in :mod:`rain.graph` returns a new
instance with a bumped revision.

The context ordering is derived, never stored: there is a single top context
(``top``), one framework root below it (``root``), and one leaf context per
distinct (values, stakeholders, features) gating triple.  Leaf ids are a
digest of the triple so that identical logical content always produces
identical ids, regardless of insertion order.

Gating is presence-only: a norm activates when all its gating features and
stakeholders are present.  Gating on the *absence* of a feature is out of
scope.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Union

from .canonical import digest_obj

SLUG_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")

# Constant context ids: the single top of the ordering and the framework
# root every norm context hangs from.
TOP_CONTEXT = "top"
FRAMEWORK_ROOT = "root"

DEFAULT_LEVEL_DEFINITIONS = (
    "Minor violation: isolated shortcomings with limited impact.",
    "Serious violation: systematic shortcomings that require remediation.",
    "Critical violation: fundamental non-compliance.",
)


def slugify(text: str) -> str:
    """Lower-case slug of ``text``: runs of non-alphanumerics become dashes."""
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return slug


def is_slug(text: str) -> bool:
    return bool(SLUG_RE.match(text))


def default_level_definitions(levels: int) -> tuple[str, ...]:
    if levels == 3:
        return DEFAULT_LEVEL_DEFINITIONS
    return tuple(f"Level {k} violation." for k in range(1, levels + 1))


class TestKind(str, Enum):
    QUIZ = "quiz"
    EVIDENCE = "evidence"
    MONITOR = "monitor"


class FailOn(str, Enum):
    """Which raw answer fails a criterion: a yes, a no, or absent evidence."""

    YES = "yes"
    NO = "no"
    ABSENT = "absent"


@dataclass(frozen=True)
class MaturityScale:
    """Graded violation scale: ``levels`` tiers, one definition text each."""

    levels: int = 3
    level_definitions: tuple[str, ...] = DEFAULT_LEVEL_DEFINITIONS

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("scale must have at least one level")
        if len(self.level_definitions) != self.levels:
            raise ValueError(
                f"scale declares {self.levels} levels but {len(self.level_definitions)} definitions"
            )

    @classmethod
    def of(cls, levels: int) -> "MaturityScale":
        return cls(levels=levels, level_definitions=default_level_definitions(levels))


@dataclass(frozen=True)
class Value:
    """A parsimonious component of a high-level value named by some policy."""

    id: str
    label: str
    aliases: frozenset[str] = frozenset()
    # (policy id, high-level value label) pairs this value decomposes from.
    source_hlvs: frozenset[tuple[str, str]] = frozenset()
    # Provenance mark for values not derived from a decomposition
    # (e.g. introduced by an expansion run's issue library).
    origin: str | None = None


@dataclass(frozen=True)
class Stakeholder:
    """A perspective of concern for a stakeholder group."""

    id: str
    label: str
    question: str
    aliases: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Feature:
    """A socio-technical use of technology that norms can gate on.

    ``staged`` marks a feature that no norm references yet (pre-prune state
    during expansion, or an explicit policy feature awaiting review).
    """

    id: str
    label: str
    question: str
    aliases: frozenset[str] = frozenset()
    staged: bool = False


Entity = Union[Value, Stakeholder, Feature]


def entity_kind(entity: Entity) -> str:
    if isinstance(entity, Value):
        return "values"
    if isinstance(entity, Stakeholder):
        return "stakeholders"
    if isinstance(entity, Feature):
        return "features"
    raise TypeError(f"not a graph entity: {entity!r}")


def match_keys(entity: Entity) -> frozenset[str]:
    """Slugs an entity answers to: its id, its label, and every alias."""
    keys = {entity.id, slugify(entity.label)}
    keys.update(slugify(a) for a in entity.aliases)
    keys.discard("")
    return frozenset(keys)


@dataclass(frozen=True)
class AssessmentCriterion:
    """One graded requirement: failing it violates the norm at ``level``."""

    level: int
    kind: TestKind
    prompt: str
    fail_on: FailOn

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("criterion level must be >= 1")


@dataclass(frozen=True)
class Norm:
    """A challenge some features pose to values with respect to stakeholders.

    Activation is the conjunction of the gating sets: every listed feature
    and stakeholder must be present.  A violation of the norm counts as a
    violation of each linked value, in the norm's own context.
    """

    id: str
    description: str
    values: frozenset[str]
    stakeholders: frozenset[str]
    features: frozenset[str]
    criteria: tuple[AssessmentCriterion, ...]
    source: str  # "policy:<id>" or "expansion:<library id>"

    def __post_init__(self):
        levels = [c.level for c in self.criteria]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"norm {self.id}: criteria levels must strictly increase")

    @property
    def triple(self) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
        return (
            tuple(sorted(self.values)),
            tuple(sorted(self.stakeholders)),
            tuple(sorted(self.features)),
        )

    @property
    def context_id(self) -> str:
        return "ctx-" + digest_obj([list(part) for part in self.triple])[:12]

    @property
    def gates(self) -> frozenset[str]:
        return self.features | self.stakeholders

    @property
    def content_key(self) -> tuple:
        return (*self.triple, self.criteria)

    def criterion_at(self, level: int) -> AssessmentCriterion | None:
        for criterion in self.criteria:
            if criterion.level == level:
                return criterion
        return None


@dataclass(frozen=True)
class ReviewedIntersection:
    """Ledger record: the (feature, value, stakeholder) triple was judged.

    ``norms`` holds the ids the review's issues resolved to; empty means the
    triple was reviewed and raises no issue.
    """

    feature: str
    value: str
    stakeholder: str
    norms: frozenset[str] = frozenset()

    @property
    def triple(self) -> tuple[str, str, str]:
        return (self.feature, self.value, self.stakeholder)

    @property
    def no_issue(self) -> bool:
        return not self.norms


@dataclass(frozen=True)
class ContextNode:
    id: str
    parent: str | None


def _sorted_entities(items) -> tuple:
    return tuple(sorted(items, key=lambda e: e.id))


def _sorted_reviewed(items) -> tuple:
    return tuple(sorted(items, key=lambda r: r.triple))


@dataclass(frozen=True)
class RainGraph:
    """Immutable snapshot of the norms graph.

    ``revision`` is runtime metadata: it increases on any change and is
    recorded by the store, but it is not part of the canonical serialization
    (two content-identical graphs always serialize identically).
    """

    scale: MaturityScale = MaturityScale()
    values: tuple[Value, ...] = ()
    stakeholders: tuple[Stakeholder, ...] = ()
    features: tuple[Feature, ...] = ()
    norms: tuple[Norm, ...] = ()
    reviewed: tuple[ReviewedIntersection, ...] = ()
    policies: tuple[str, ...] = ()
    revision: int = 0

    @cached_property
    def values_by_id(self) -> dict[str, Value]:
        return {v.id: v for v in self.values}

    @cached_property
    def stakeholders_by_id(self) -> dict[str, Stakeholder]:
        return {s.id: s for s in self.stakeholders}

    @cached_property
    def features_by_id(self) -> dict[str, Feature]:
        return {f.id: f for f in self.features}

    @cached_property
    def norms_by_id(self) -> dict[str, Norm]:
        return {n.id: n for n in self.norms}

    @cached_property
    def reviewed_by_triple(self) -> dict[tuple[str, str, str], ReviewedIntersection]:
        return {r.triple: r for r in self.reviewed}

    @cached_property
    def norms_by_gate(self) -> dict[str, tuple[Norm, ...]]:
        gated: dict[str, list[Norm]] = {}
        for norm in self.norms:
            for gate in norm.gates:
                gated.setdefault(gate, []).append(norm)
        return {gate: tuple(norms) for gate, norms in gated.items()}

    @property
    def contexts(self) -> tuple[ContextNode, ...]:
        leaves = sorted({n.context_id for n in self.norms})
        nodes = [ContextNode(TOP_CONTEXT, None), ContextNode(FRAMEWORK_ROOT, TOP_CONTEXT)]
        nodes.extend(ContextNode(leaf, FRAMEWORK_ROOT) for leaf in leaves)
        return tuple(nodes)

    def context_chain(self, context_id: str) -> tuple[str, ...]:
        """Ancestor chain from ``context_id`` up to the top context."""
        by_id = {c.id: c for c in self.contexts}
        chain = [context_id]
        node = by_id[context_id]
        while node.parent is not None:
            chain.append(node.parent)
            node = by_id[node.parent]
        return tuple(chain)

    def evolve(self, **changes) -> "RainGraph":
        """New snapshot with ``changes`` applied, re-sorted, revision bumped."""
        for key, sort in (
            ("values", _sorted_entities),
            ("stakeholders", _sorted_entities),
            ("features", _sorted_entities),
            ("norms", _sorted_entities),
            ("reviewed", _sorted_reviewed),
        ):
            if key in changes:
                changes[key] = sort(changes[key])
        if "policies" in changes:
            changes["policies"] = tuple(sorted(set(changes["policies"])))
        changes.setdefault("revision", self.revision + 1)
        return replace(self, **changes)


def make_graph(
    scale: MaturityScale | None = None,
    values=(),
    stakeholders=(),
    features=(),
    norms=(),
    reviewed=(),
    policies=(),
    revision: int = 0,
) -> RainGraph:
    """Build a graph with canonical internal ordering."""
    return RainGraph(
        scale=scale or MaturityScale(),
        values=_sorted_entities(values),
        stakeholders=_sorted_entities(stakeholders),
        features=_sorted_entities(features),
        norms=_sorted_entities(norms),
        reviewed=_sorted_reviewed(reviewed),
        policies=tuple(sorted(set(policies))),
        revision=revision,
    )
