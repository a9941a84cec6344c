"""Aggregation of norm violations onto values, stakeholders, features, and
policies; the compliance predicate; projections; what-if evaluation.

Aggregation is a worst-score threshold model: within a group, the score is
the worst violation among its active norms.  The maturity of a group is the
order-reversed violation, ``maturity = levels + 1 - worst`` — full maturity
(levels + 1) means no violation at all.  An unassessed active norm
dominates every numeric result: incompleteness must never read as
compliance, and doing well on an unrelated norm never masks the worst one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl.graph_text import graph_digest
from .dsl.projection import Aggregator, GraphQuery, ProjectionRuleSet
from .errors import BindingError, UnknownEntityError
from .model import Norm
from .session import (
    INCOMPLETE,
    Activation,
    Presence,
    Session,
    Violation,
    active_norms,
    assert_context,
)

Maturity = Violation  # int 1..levels+1, or "incomplete"


@dataclass(frozen=True)
class GroupReport:
    """Worst-score aggregation over the active norms touching one entity."""

    group_id: str
    label: str
    worst_violation: Violation
    maturity: Maturity
    norms: tuple[tuple[str, Violation], ...]  # (norm id, violation), sorted by id

    def to_dict(self) -> dict:
        return {
            "id": self.group_id,
            "label": self.label,
            "worst_violation": self.worst_violation,
            "maturity": self.maturity,
            "norms": [[norm_id, violation] for norm_id, violation in self.norms],
        }


def _aggregate(levels: int, group_id: str, label: str, contributions: list[tuple[str, Violation]]) -> GroupReport:
    worst: Violation = 0
    for _, violation in contributions:
        if violation == INCOMPLETE:
            worst = INCOMPLETE
            break
        worst = max(worst, violation)  # type: ignore[type-var]
    maturity: Maturity = INCOMPLETE if worst == INCOMPLETE else levels + 1 - int(worst)
    return GroupReport(
        group_id=group_id,
        label=label,
        worst_violation=worst,
        maturity=maturity,
        norms=tuple(sorted(contributions)),
    )


def _active_with_violations(session: Session) -> list[tuple[Norm, Violation]]:
    statuses = active_norms(session)
    pairs = []
    for norm in session.graph.norms:
        status = statuses[norm.id]
        if status.state is Activation.ACTIVE:
            assert status.violation is not None
            pairs.append((norm, status.violation))
    return pairs


def aggregate_value(session: Session, value_id: str) -> GroupReport:
    """Worst violation among active norms linked to the value."""
    value = session.graph.values_by_id.get(value_id)
    if value is None:
        raise UnknownEntityError(f"unknown value: {value_id}", ids=(value_id,))
    contributions = [
        (norm.id, violation)
        for norm, violation in _active_with_violations(session)
        if value_id in norm.values
    ]
    return _aggregate(session.graph.scale.levels, value_id, value.label, contributions)


_DIMENSIONS = ("value", "stakeholder", "feature", "policy")


def _norm_groups(norm: Norm, dimension: str) -> frozenset[str]:
    if dimension == "value":
        return norm.values
    if dimension == "stakeholder":
        return norm.stakeholders
    if dimension == "feature":
        return norm.features
    prefix, _, policy_id = norm.source.partition(":")
    return frozenset({policy_id} if prefix == "policy" and policy_id else set())


def aggregate_by(session: Session, dimension: str) -> list[GroupReport]:
    """One report per entity of the chosen dimension, every entity included."""
    if dimension not in _DIMENSIONS:
        raise ValueError(f"dimension must be one of {', '.join(_DIMENSIONS)}")
    graph = session.graph
    if dimension == "value":
        groups = {v.id: v.label for v in graph.values}
    elif dimension == "stakeholder":
        groups = {s.id: s.label for s in graph.stakeholders}
    elif dimension == "feature":
        groups = {f.id: f.label for f in graph.features}
    else:
        groups = {p: p for p in graph.policies}
    contributions: dict[str, list[tuple[str, Violation]]] = {gid: [] for gid in groups}
    for norm, violation in _active_with_violations(session):
        for group_id in _norm_groups(norm, dimension):
            if group_id in contributions:
                contributions[group_id].append((norm.id, violation))
    return [
        _aggregate(graph.scale.levels, gid, groups[gid], contributions[gid])
        for gid in sorted(groups)
    ]


def is_ethical_compliant(session: Session) -> bool | str:
    """True iff every active norm is violation-free; incompleteness dominates."""
    violations = [violation for _, violation in _active_with_violations(session)]
    if any(v == INCOMPLETE for v in violations):
        return INCOMPLETE
    return all(v == 0 for v in violations)


def _evaluate_query(session: Session, query: GraphQuery):
    graph = session.graph
    unresolved = []
    for ids, known in (
        (query.values, graph.values_by_id),
        (query.stakeholders, graph.stakeholders_by_id),
        (query.features, graph.features_by_id),
    ):
        if ids:
            unresolved.extend(i for i in sorted(ids) if i not in known)
    if query.source_policy and query.source_policy not in graph.policies:
        unresolved.append(query.source_policy)
    if unresolved:
        raise BindingError(
            "projection query names unknown ids: " + ", ".join(unresolved), ids=tuple(unresolved)
        )

    matched = []
    for norm, violation in _active_with_violations(session):
        if query.values is not None and not (norm.values & query.values):
            continue
        if query.stakeholders is not None and not (norm.stakeholders & query.stakeholders):
            continue
        if query.features is not None and not (norm.features & query.features):
            continue
        if query.source_policy is not None and norm.source != f"policy:{query.source_policy}":
            continue
        matched.append((norm.id, violation))

    if query.aggregator is Aggregator.NORM_LIST:
        return [[norm_id, violation] for norm_id, violation in sorted(matched)]
    report = _aggregate(session.graph.scale.levels, "query", "query", matched)
    if query.aggregator is Aggregator.WORST_VIOLATION:
        return report.worst_violation
    return report.maturity


def project(session: Session, ruleset: ProjectionRuleSet) -> list[dict]:
    """Evaluate every rule independently against the session."""
    results = []
    for rule in ruleset.rules:
        results.append({"item": rule.item_id, "result": _evaluate_query(session, rule.query)})
    return results


def report_bundle(session: Session, rulesets: tuple[ProjectionRuleSet, ...] = ()) -> dict:
    """The full results bundle: per-dimension sections, compliance, projections.

    Deliberately free of timestamps and session ids, so that two runs that
    made the same assertions and gave the same answers produce identical
    bundles, however they were driven.
    """
    graph = session.graph
    bundle = {
        "graph": {
            "digest": graph_digest(graph),
            "policies": list(graph.policies),
            "scale": graph.scale.levels,
        },
        "compliant": is_ethical_compliant(session),
        "values": [r.to_dict() for r in aggregate_by(session, "value")],
        "stakeholders": [r.to_dict() for r in aggregate_by(session, "stakeholder")],
        "features": [r.to_dict() for r in aggregate_by(session, "feature")],
        "policies": [r.to_dict() for r in aggregate_by(session, "policy")],
        "projections": [
            {"ruleset": rs.id, "external": rs.external, "items": project(session, rs)}
            for rs in sorted(rulesets, key=lambda r: r.id)
        ],
    }
    return bundle


def bundle_json(bundle: dict) -> str:
    from .canonical import canonical_json

    return canonical_json(bundle)


def what_if(session: Session, overrides: dict[str, Presence], rulesets: tuple[ProjectionRuleSet, ...] = ()) -> dict:
    """Report bundle under hypothetical presences; the session is untouched.

    Norms the hypothesis newly activates report incomplete unless they
    already have answers — an unexplored activation must not look compliant.
    """
    graph = session.graph
    unknown = [
        entity_id
        for entity_id in sorted(overrides)
        if entity_id not in graph.features_by_id and entity_id not in graph.stakeholders_by_id
    ]
    if unknown:
        raise UnknownEntityError("unknown context entities: " + ", ".join(unknown), ids=tuple(unknown))
    shadow = session
    for entity_id in sorted(overrides):
        shadow = assert_context(shadow, entity_id, Presence(overrides[entity_id]))
    return report_bundle(shadow, rulesets)
