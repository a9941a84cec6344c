"""Graph operations: distinctness-preserving merge, validation, and diff.

Merging is the only way content enters a graph.  An entity merge unifies
with an existing entity when their canonical ids or alias slugs intersect;
unification unions aliases and provenance and keeps the first-registered id.
A norm merge dedupes on content — the (values, stakeholders, features,
criteria) quadruple — and shares one context per distinct gating triple.

All operations take and return immutable graph snapshots; the returned delta
is computed by diffing the before/after snapshots, so "empty delta" and
"identical canonical serialization" are the same fact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import AmbiguousAliasError, IntegrityError, ScaleMismatchError
from .model import (
    Entity,
    Feature,
    Norm,
    RainGraph,
    ReviewedIntersection,
    Stakeholder,
    Value,
    entity_kind,
    is_slug,
    match_keys,
    slugify,
)

ENTITY_SECTIONS = ("values", "stakeholders", "features")
DELTA_SECTIONS = ENTITY_SECTIONS + ("norms", "reviewed", "policies")


@dataclass(frozen=True)
class GraphDelta:
    """Per-section id lists of what a change added, altered, or removed."""

    added: dict[str, tuple[str, ...]]
    changed: dict[str, tuple[str, ...]]
    removed: dict[str, tuple[str, ...]]

    @property
    def empty(self) -> bool:
        return not any(self.added.values()) and not any(self.changed.values()) and not any(
            self.removed.values()
        )

    def to_dict(self) -> dict:
        return {
            "added": {k: list(v) for k, v in self.added.items()},
            "changed": {k: list(v) for k, v in self.changed.items()},
            "removed": {k: list(v) for k, v in self.removed.items()},
            "empty": self.empty,
        }

    def summary(self) -> str:
        if self.empty:
            return "no change"
        parts = []
        for verb, sections in (("added", self.added), ("changed", self.changed), ("removed", self.removed)):
            for section in DELTA_SECTIONS:
                ids = sections.get(section, ())
                if ids:
                    parts.append(f"{verb} {len(ids)} {section}: {', '.join(ids)}")
        return "; ".join(parts)


def _empty_sections() -> dict[str, tuple[str, ...]]:
    return {section: () for section in DELTA_SECTIONS}


def empty_delta() -> GraphDelta:
    return GraphDelta(_empty_sections(), _empty_sections(), _empty_sections())


def _section_items(graph: RainGraph, section: str) -> dict[str, object]:
    if section == "reviewed":
        return {"/".join(r.triple): r for r in graph.reviewed}
    if section == "policies":
        return {p: p for p in graph.policies}
    return {e.id: e for e in getattr(graph, section)}


def diff_graphs(a: RainGraph, b: RainGraph) -> GraphDelta:
    """Delta from ``a`` to ``b``; empty iff their canonical forms are identical."""
    if a.scale != b.scale:
        raise ScaleMismatchError(
            f"cannot diff graphs with different scales ({a.scale.levels} vs {b.scale.levels} levels)"
        )
    added: dict[str, tuple[str, ...]] = {}
    changed: dict[str, tuple[str, ...]] = {}
    removed: dict[str, tuple[str, ...]] = {}
    for section in DELTA_SECTIONS:
        items_a = _section_items(a, section)
        items_b = _section_items(b, section)
        added[section] = tuple(sorted(set(items_b) - set(items_a)))
        removed[section] = tuple(sorted(set(items_a) - set(items_b)))
        changed[section] = tuple(
            sorted(k for k in set(items_a) & set(items_b) if items_a[k] != items_b[k])
        )
    return GraphDelta(added, changed, removed)


def entity_problems(entity: Entity) -> list[str]:
    """Structural problems with a single entity, independent of any graph."""
    problems = []
    if not entity.id:
        problems.append("id is empty")
    elif not is_slug(entity.id):
        problems.append(f"id {entity.id!r} is not a lowercase slug")
    if not entity.label.strip():
        problems.append("label is empty")
    if isinstance(entity, (Stakeholder, Feature)) and not entity.question.strip():
        problems.append("question text is empty")
    if isinstance(entity, Value) and not entity.source_hlvs and not entity.origin:
        problems.append("value has neither a source high-level value nor a provenance mark")
    return problems


def _unify(existing: Entity, incoming: Entity) -> Entity:
    """Union aliases and provenance into ``existing``; first registration wins
    for id, label, and question text."""
    known = match_keys(existing)
    new_aliases = set(existing.aliases)
    for text in (incoming.id, incoming.label, *sorted(incoming.aliases)):
        if text and slugify(text) not in known:
            new_aliases.add(text)
            known = known | {slugify(text)}
    changes: dict = {}
    if new_aliases != set(existing.aliases):
        changes["aliases"] = frozenset(new_aliases)
    if isinstance(existing, Value):
        merged_sources = existing.source_hlvs | incoming.source_hlvs  # type: ignore[union-attr]
        if merged_sources != existing.source_hlvs:
            changes["source_hlvs"] = merged_sources
        if existing.origin is None and incoming.origin is not None:  # type: ignore[union-attr]
            changes["origin"] = incoming.origin  # type: ignore[union-attr]
    if isinstance(existing, (Stakeholder, Feature)) and not existing.question.strip():
        if incoming.question.strip():  # type: ignore[union-attr]
            changes["question"] = incoming.question  # type: ignore[union-attr]
    if isinstance(existing, Feature) and existing.staged and not incoming.staged:  # type: ignore[union-attr]
        changes["staged"] = False
    if not changes:
        return existing
    return replace(existing, **changes)


def merge_entity(graph: RainGraph, entity: Entity) -> tuple[RainGraph, GraphDelta]:
    """Add ``entity`` preserving semantic distinctness.

    Matching is mechanical: canonical id plus alias-slug intersection.  One
    match unifies; no match adds; two or more distinct matches is an
    ambiguity error, never a silent choice.
    """
    problems = entity_problems(entity)
    if problems:
        raise IntegrityError(f"invalid {entity_kind(entity)[:-1]} {entity.id!r}: " + "; ".join(problems))
    section = entity_kind(entity)
    existing_items = getattr(graph, section)
    keys = match_keys(entity)
    candidates = [e for e in existing_items if match_keys(e) & keys]
    if len(candidates) > 1:
        raise AmbiguousAliasError(
            f"{section[:-1]} {entity.id!r} matches {len(candidates)} distinct entities: "
            + ", ".join(sorted(c.id for c in candidates)),
            ids=tuple(sorted(c.id for c in candidates)),
        )
    if not candidates:
        updated = graph.evolve(**{section: existing_items + (entity,)})
        return updated, diff_graphs(graph, updated)
    unified = _unify(candidates[0], entity)
    if unified == candidates[0]:
        return graph, empty_delta()
    replaced = tuple(unified if e.id == unified.id else e for e in existing_items)
    updated = graph.evolve(**{section: replaced})
    return updated, diff_graphs(graph, updated)


def norm_problems(graph: RainGraph, norm: Norm) -> list[str]:
    """Problems with ``norm`` in the context of ``graph``."""
    problems = []
    if not norm.id:
        problems.append("id is empty")
    elif not is_slug(norm.id):
        problems.append(f"id {norm.id!r} is not a lowercase slug")
    for label, ids, known in (
        ("value", norm.values, graph.values_by_id),
        ("stakeholder", norm.stakeholders, graph.stakeholders_by_id),
        ("feature", norm.features, graph.features_by_id),
    ):
        if not ids:
            problems.append(f"no {label}s linked")
        missing = sorted(i for i in ids if i not in known)
        if missing:
            problems.append(f"unknown {label} ids: {', '.join(missing)}")
    if not norm.criteria:
        problems.append("no assessment criteria")
    for criterion in norm.criteria:
        if criterion.level > graph.scale.levels:
            problems.append(
                f"criterion level {criterion.level} exceeds the scale ({graph.scale.levels} levels)"
            )
        if not criterion.prompt.strip():
            problems.append(f"criterion level {criterion.level} has an empty prompt")
    return problems


def merge_norm(graph: RainGraph, norm: Norm) -> tuple[RainGraph, GraphDelta]:
    """Merge a norm, deduping on content.

    Identical (values, stakeholders, features, criteria) → no change.  Same
    gating triple with different criteria → a distinct norm sharing the
    existing context.  A new triple gets a fresh context below the framework
    root.  Features the norm references stop being staged.
    """
    problems = norm_problems(graph, norm)
    if problems:
        missing = tuple(
            i
            for ids, known in (
                (norm.values, graph.values_by_id),
                (norm.stakeholders, graph.stakeholders_by_id),
                (norm.features, graph.features_by_id),
            )
            for i in sorted(ids)
            if i not in known
        )
        raise IntegrityError(f"cannot merge norm {norm.id!r}: " + "; ".join(problems), ids=missing)
    for existing in graph.norms:
        if existing.content_key == norm.content_key:
            return graph, empty_delta()
    if norm.id in graph.norms_by_id:
        raise IntegrityError(
            f"norm id {norm.id!r} is already bound to different content", ids=(norm.id,)
        )
    features = tuple(
        replace(f, staged=False) if f.id in norm.features and f.staged else f
        for f in graph.features
    )
    updated = graph.evolve(norms=graph.norms + (norm,), features=features)
    return updated, diff_graphs(graph, updated)


def add_reviewed(graph: RainGraph, record: ReviewedIntersection) -> RainGraph:
    """Record a reviewed intersection, superseding any record for its triple."""
    existing = graph.reviewed_by_triple.get(record.triple)
    if existing == record:
        return graph
    if existing is None:
        return graph.evolve(reviewed=graph.reviewed + (record,))
    kept = tuple(r for r in graph.reviewed if r.triple != record.triple)
    return graph.evolve(reviewed=kept + (record,))


@dataclass(frozen=True)
class InvariantViolation:
    """One broken invariant, naming the entity it concerns."""

    section: str
    entity_id: str
    message: str

    def __str__(self) -> str:
        return f"{self.section}/{self.entity_id}: {self.message}"


def validate_graph(graph: RainGraph) -> list[InvariantViolation]:
    """Report every broken type invariant; an empty list means a valid graph."""
    reports: list[InvariantViolation] = []

    def flag(section: str, entity_id: str, message: str):
        reports.append(InvariantViolation(section, entity_id, message))

    if len(graph.scale.level_definitions) != graph.scale.levels:
        flag("scale", "scale", "level definition count does not match the number of levels")

    for section in ENTITY_SECTIONS:
        seen_ids: set[str] = set()
        for entity in getattr(graph, section):
            for problem in entity_problems(entity):
                flag(section, entity.id, problem)
            if entity.id in seen_ids:
                flag(section, entity.id, "duplicate id")
            seen_ids.add(entity.id)

    # Context assertions address gates by bare id, so the two gate namespaces
    # must not collide.
    for eid in sorted(set(graph.features_by_id) & set(graph.stakeholders_by_id)):
        flag("features", eid, "id collides with a stakeholder id")

    norm_referenced: set[str] = set()
    seen_norm_ids: set[str] = set()
    seen_content: dict[tuple, str] = {}
    for norm in graph.norms:
        for problem in norm_problems(graph, norm):
            flag("norms", norm.id, problem)
        if norm.id in seen_norm_ids:
            flag("norms", norm.id, "duplicate id")
        seen_norm_ids.add(norm.id)
        if norm.content_key in seen_content:
            flag(
                "norms",
                norm.id,
                f"identical content to norm {seen_content[norm.content_key]!r}",
            )
        else:
            seen_content[norm.content_key] = norm.id
        norm_referenced.update(norm.features)

    for feature in graph.features:
        if feature.id not in norm_referenced and not feature.staged:
            flag("features", feature.id, "referenced by no norm and not staged")

    for record in graph.reviewed:
        if record.value not in graph.values_by_id:
            flag("reviewed", "/".join(record.triple), f"unknown value id: {record.value}")
        if record.stakeholder not in graph.stakeholders_by_id:
            flag("reviewed", "/".join(record.triple), f"unknown stakeholder id: {record.stakeholder}")
        # record.feature may be a pruned feature; that is the point of the ledger.
        for norm_id in sorted(record.norms):
            if norm_id not in graph.norms_by_id:
                flag("reviewed", "/".join(record.triple), f"unknown norm id: {norm_id}")

    for policy_id in graph.policies:
        if not is_slug(policy_id):
            flag("policies", policy_id, f"policy id {policy_id!r} is not a lowercase slug")

    return reports
