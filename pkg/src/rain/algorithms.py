"""Decomposition and expansion of policies into the graph, plus coverage.

Decomposition merges a policy document's content: component values of every
high-level value, explicit stakeholders and features, then one norm per
issue.  Expansion sweeps every unreviewed (feature, value, stakeholder)
intersection past an issue source — the pluggable seat of human judgment —
records the verdicts in the reviewed ledger, and finally prunes features no
norm ended up referencing.  Both are idempotent: a second run with the same
inputs and answers changes nothing.

Expansion commits all-or-nothing: if the source leaves any triple
unanswered, the original graph is returned untouched and the report lists
the pending triples.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Protocol

from .dsl.common import IssueDecl
from .dsl.issues import IssueTemplateLibrary
from .dsl.policy import PolicyDoc
from .errors import IntegrityError, ScaleMismatchError
from .graph import GraphDelta, add_reviewed, diff_graphs, merge_entity, merge_norm
from .model import Feature, RainGraph, ReviewedIntersection, Stakeholder, Value

Triple = tuple[str, str, str]  # (feature, value, stakeholder)


class IssueSource(Protocol):
    """Supplier of judgment for one intersection at a time.

    ``issues_for`` returns the issues the feature raises for the value with
    respect to the stakeholder: an empty list means "reviewed, no issue";
    ``None`` means the source cannot answer (the run aborts with the triple
    pending).  ``declared`` supplies entity declarations for ids an issue
    references that the graph does not contain yet.
    """

    def issues_for(self, feature_id: str, value_id: str, stakeholder_id: str) -> list[IssueDecl] | None:
        ...

    def declared(self, kind: str, entity_id: str) -> Value | Stakeholder | Feature | None:
        ...


class TemplateIssueSource:
    """Total source backed by a template library: no matching entry, no issue."""

    def __init__(self, library: IssueTemplateLibrary):
        self.library = library

    @property
    def name(self) -> str:
        return self.library.id

    def issues_for(self, feature_id: str, value_id: str, stakeholder_id: str) -> list[IssueDecl]:
        issues = []
        seen = set()
        for entry in self.library.entries:
            if entry.matches(feature_id, value_id, stakeholder_id) and entry.issue.id not in seen:
                seen.add(entry.issue.id)
                issues.append(entry.issue)
        return issues

    def declared(self, kind: str, entity_id: str):
        return self.library.declared(kind, entity_id)


class BatchAnswerSource:
    """Partial source backed by explicit per-triple answers.

    A triple without an entry is unanswered, which aborts the run — batch
    files are resumable partial judgments, unlike template libraries.
    """

    def __init__(
        self,
        answers: dict[Triple, list[IssueDecl]],
        declarations: dict[str, dict[str, Value | Stakeholder | Feature]] | None = None,
        name: str = "batch",
    ):
        self.answers = dict(answers)
        self.declarations = declarations or {}
        self.name = name

    def issues_for(self, feature_id: str, value_id: str, stakeholder_id: str) -> list[IssueDecl] | None:
        return self.answers.get((feature_id, value_id, stakeholder_id))

    def declared(self, kind: str, entity_id: str):
        return self.declarations.get(kind, {}).get(entity_id)


@dataclass(frozen=True)
class ReviewedAnswer:
    """Verbatim record of one source answer, for the audit journal."""

    feature: str
    value: str
    stakeholder: str
    issues: tuple[IssueDecl, ...]

    def to_dict(self) -> dict:
        from .dsl.common import issue_to_dict

        return {
            "feature": self.feature,
            "value": self.value,
            "stakeholder": self.stakeholder,
            "issues": [issue_to_dict(i) for i in self.issues],
        }


@dataclass(frozen=True)
class ExpansionReport:
    queried: int
    norms_added: tuple[str, ...]
    features_pruned: tuple[str, ...]
    pending: tuple[Triple, ...]
    answers: tuple[ReviewedAnswer, ...] = ()

    @property
    def empty(self) -> bool:
        return self.queried == 0 and not self.norms_added and not self.features_pruned and not self.pending

    @property
    def completed(self) -> bool:
        return not self.pending

    def to_dict(self) -> dict:
        return {
            "queried": self.queried,
            "norms_added": list(self.norms_added),
            "features_pruned": list(self.features_pruned),
            "pending": [list(t) for t in self.pending],
        }


def decompose(graph: RainGraph, policy: PolicyDoc) -> tuple[RainGraph, GraphDelta]:
    """Encode a policy into the graph; idempotent."""
    if policy.scale is not None and policy.scale != graph.scale.levels:
        raise ScaleMismatchError(
            f"policy {policy.id!r} declares a {policy.scale}-level scale but the graph uses {graph.scale.levels}"
        )
    before = graph
    for hlv_label, decl in policy.component_values():
        value = Value(
            id=decl.id,
            label=decl.label,
            aliases=decl.aliases,
            source_hlvs=frozenset({(policy.id, hlv_label)}),
        )
        graph, _ = merge_entity(graph, value)
    for stakeholder in policy.stakeholders:
        graph, _ = merge_entity(graph, stakeholder)
    for feature in policy.features:
        graph, _ = merge_entity(graph, feature)
    for issue in policy.issues:
        graph, _ = merge_norm(graph, issue.to_norm(source=f"policy:{policy.id}"))
    if policy.id not in graph.policies:
        graph = graph.evolve(policies=graph.policies + (policy.id,))
    return graph, diff_graphs(before, graph)


def _apply_issue(graph: RainGraph, issue: IssueDecl, source: IssueSource, source_label: str) -> tuple[RainGraph, str]:
    """Merge one issue as a norm, pulling missing entity declarations from the source."""
    for kind, ids in (("values", issue.values), ("stakeholders", issue.stakeholders), ("features", issue.features)):
        known = getattr(graph, f"{kind}_by_id")
        for entity_id in sorted(ids):
            if entity_id in known:
                continue
            declaration = source.declared(kind, entity_id)
            if declaration is None:
                raise IntegrityError(
                    f"issue {issue.id!r} references unknown {kind[:-1]} {entity_id!r} "
                    "and the issue source declares no such entity",
                    ids=(entity_id,),
                )
            graph, _ = merge_entity(graph, declaration)
            known = getattr(graph, f"{kind}_by_id")
    norm = issue.to_norm(source=source_label)
    graph, _ = merge_norm(graph, norm)
    # The merge may have deduped onto an existing norm with different id.
    for existing in graph.norms:
        if existing.content_key == norm.content_key:
            return graph, existing.id
    raise AssertionError("merged norm not found")  # pragma: no cover


def _unreviewed(graph: RainGraph) -> list[Triple]:
    triples = []
    reviewed = graph.reviewed_by_triple
    for feature in graph.features:
        for value in graph.values:
            for stakeholder in graph.stakeholders:
                triple = (feature.id, value.id, stakeholder.id)
                if triple not in reviewed:
                    triples.append(triple)
    return triples


def _fully_reviewed_elsewhere(graph: RainGraph, feature: Feature) -> bool:
    """True when a feature absent from the graph has nothing left to judge:
    every current (feature, value, stakeholder) triple already has a reviewed
    record (vacuously so when the product is empty).  Such a feature was
    reviewed and pruned before; re-staging it would be pure churn."""
    if feature.id in graph.features_by_id:
        return False
    reviewed = graph.reviewed_by_triple
    for value in graph.values:
        for stakeholder in graph.stakeholders:
            if (feature.id, value.id, stakeholder.id) not in reviewed:
                return False
    return True


def expand(
    graph: RainGraph,
    new_features: tuple[Feature, ...] | list[Feature],
    source: IssueSource,
) -> tuple[RainGraph, ExpansionReport]:
    """Sweep unreviewed intersections past the source; all-or-nothing commit."""
    before = graph
    source_label = f"expansion:{getattr(source, 'name', 'source')}"

    working = graph
    for feature in sorted(new_features, key=lambda f: f.id):
        if _fully_reviewed_elsewhere(working, feature):
            continue
        staged = feature if feature.staged else replace(feature, staged=True)
        working, _ = merge_entity(working, staged)

    answers: list[ReviewedAnswer] = []
    answered: set[Triple] = set()
    while True:
        pending_now = [t for t in _unreviewed(working) if t not in answered]
        if not pending_now:
            break
        for triple in sorted(pending_now):
            feature_id, value_id, stakeholder_id = triple
            issues = source.issues_for(feature_id, value_id, stakeholder_id)
            if issues is None:
                remaining = tuple(sorted(t for t in _unreviewed(working) if t not in answered))
                report = ExpansionReport(
                    queried=len(answered),
                    norms_added=(),
                    features_pruned=(),
                    pending=remaining,
                    answers=tuple(answers),
                )
                return before, report
            norm_ids = []
            for issue in issues:
                working, norm_id = _apply_issue(working, issue, source, source_label)
                norm_ids.append(norm_id)
            working = add_reviewed(
                working,
                ReviewedIntersection(
                    feature=feature_id,
                    value=value_id,
                    stakeholder=stakeholder_id,
                    norms=frozenset(norm_ids),
                ),
            )
            answered.add(triple)
            answers.append(ReviewedAnswer(feature_id, value_id, stakeholder_id, tuple(issues)))

    # Prune: features no norm references are removed; their reviewed records
    # stay so the judgment is never repeated.
    referenced = {fid for norm in working.norms for fid in norm.features}
    pruned = tuple(sorted(f.id for f in working.features if f.id not in referenced))
    if pruned:
        working = working.evolve(features=tuple(f for f in working.features if f.id in referenced))

    delta = diff_graphs(before, working)
    if delta.empty:
        working = before
    report = ExpansionReport(
        queried=len(answered),
        norms_added=delta.added["norms"],
        features_pruned=pruned,
        pending=(),
        answers=tuple(answers),
    )
    return working, report


def covers_policy(graph: RainGraph, policy: PolicyDoc) -> tuple[bool, GraphDelta]:
    """True iff re-decomposing the policy would change nothing."""
    _, delta = decompose(graph, policy)
    return delta.empty, delta


def covers_features(graph: RainGraph, feature_ids) -> tuple[bool, tuple[Triple, ...]]:
    """True iff every triple involving the given features is reviewed.

    A feature that was pruned after a no-issue review still counts as
    covered — its reviewed records survive pruning.
    """
    ids = sorted({f.id if isinstance(f, Feature) else str(f) for f in feature_ids})
    reviewed = graph.reviewed_by_triple
    pending = []
    for feature_id in ids:
        for value in graph.values:
            for stakeholder in graph.stakeholders:
                triple = (feature_id, value.id, stakeholder.id)
                if triple not in reviewed:
                    pending.append(triple)
    return (not pending, tuple(pending))
