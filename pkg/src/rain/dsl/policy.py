"""Policy documents (``.rainpol``): parsing and canonical serialization.

A policy declares high-level value decompositions, explicit stakeholders and
features, and issues.  Parsed documents are stored in canonical order
(everything sorted by id), so permuting declarations in the source yields an
equal document and an identical canonical serialization.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..model import Feature, Stakeholder, Value
from .common import (
    IssueDecl,
    emit_issue,
    parse_feature,
    parse_issue,
    parse_stakeholder,
    default_label,
)
from .reader import BlockView, Diagnostics, Writer, single_root

POLICY_FIELDS = {"title", "scale"}
POLICY_BLOCKS = {"hlv", "stakeholder", "feature", "issue"}


@dataclass(frozen=True)
class ValueDecl:
    """One component value of a high-level value decomposition."""

    id: str
    label: str
    aliases: frozenset[str] = frozenset()


@dataclass(frozen=True)
class HlvDecomposition:
    slug: str
    label: str
    values: tuple[ValueDecl, ...]


@dataclass(frozen=True)
class PolicyDoc:
    id: str
    title: str
    scale: int | None
    hlvs: tuple[HlvDecomposition, ...]
    stakeholders: tuple[Stakeholder, ...]
    features: tuple[Feature, ...]
    issues: tuple[IssueDecl, ...]

    def component_values(self) -> list[tuple[str, ValueDecl]]:
        """(hlv label, value declaration) pairs, in canonical order."""
        return [(hlv.label, decl) for hlv in self.hlvs for decl in hlv.values]


def parse_policy(text: str) -> PolicyDoc:
    root = single_root(text, "policy", "a policy document")
    diags = Diagnostics()
    view = BlockView(root, diags)
    policy_id = view.slug_arg(0, "a policy id")
    view.no_extra_args(1)
    view.check_known(field_keys=POLICY_FIELDS, child_keywords=POLICY_BLOCKS)

    title = view.text("title", default=default_label(policy_id))
    scale = view.int_value("scale")
    if scale is not None and scale < 1:
        diags.error(root.line, root.column, "a scale of at least 1", str(scale))
        scale = None
    max_level = scale or 3

    seen: dict[str, tuple[int, int]] = {}

    def claim(namespace: str, entity_id: str | None, line: int, column: int) -> bool:
        if entity_id is None:
            return False
        key = f"{namespace}:{entity_id}"
        if key in seen:
            diags.error(line, column, f"a unique {namespace} id (duplicate of line {seen[key][0]})", entity_id)
            return False
        seen[key] = (line, column)
        return True

    hlvs = []
    for hlv_block in view.children("hlv"):
        hv = BlockView(hlv_block, diags)
        slug = hv.slug_arg(0, "a high-level value slug")
        hv.no_extra_args(1)
        hv.check_known(field_keys={"label"}, child_keywords={"value"})
        label = hv.text("label", default=default_label(slug))
        if not claim("hlv", slug, hlv_block.line, hlv_block.column):
            continue
        decls = []
        for value_block in hv.children("value"):
            vv = BlockView(value_block, diags)
            vid = vv.slug_arg(0, "a value id")
            vv.no_extra_args(1)
            vv.check_known(field_keys={"label", "alias"})
            vlabel = vv.text("label", default=default_label(vid))
            if not claim("value", vid, value_block.line, value_block.column):
                continue
            decls.append(ValueDecl(id=vid, label=vlabel or vid, aliases=frozenset(vv.texts("alias"))))
        if not decls:
            diags.error(hlv_block.line, hlv_block.column, "at least one component value", slug or "hlv")
            continue
        hlvs.append(HlvDecomposition(slug=slug, label=label or slug, values=tuple(sorted(decls, key=lambda d: d.id))))
    if not view.children("hlv"):
        diags.error(root.line, root.column, "at least one hlv decomposition", root.keyword)

    stakeholders = []
    for block in view.children("stakeholder"):
        entity = parse_stakeholder(block, diags)
        if entity and claim("gate", entity.id, block.line, block.column):
            stakeholders.append(entity)

    features = []
    for block in view.children("feature"):
        entity = parse_feature(block, diags, staged=True)
        if entity and claim("gate", entity.id, block.line, block.column):
            features.append(entity)

    issues = []
    for block in view.children("issue"):
        issue = parse_issue(block, diags, max_level)
        if issue and claim("issue", issue.id, block.line, block.column):
            issues.append(issue)

    diags.raise_if_any()
    return PolicyDoc(
        id=policy_id,
        title=title or policy_id,
        scale=scale,
        hlvs=tuple(sorted(hlvs, key=lambda h: h.slug)),
        stakeholders=tuple(sorted(stakeholders, key=lambda s: s.id)),
        features=tuple(sorted(features, key=lambda f: f.id)),
        issues=tuple(sorted(issues, key=lambda i: i.id)),
    )


def serialize_policy(doc: PolicyDoc) -> str:
    writer = Writer()
    with writer.block("policy", doc.id):
        writer.field("title", doc.title)
        if doc.scale is not None:
            writer.field("scale", str(doc.scale))
        for hlv in sorted(doc.hlvs, key=lambda h: h.slug):
            with writer.block("hlv", hlv.slug):
                writer.field("label", hlv.label)
                for decl in sorted(hlv.values, key=lambda d: d.id):
                    with writer.block("value", decl.id):
                        writer.field("label", decl.label)
                        for alias in sorted(decl.aliases):
                            writer.field("alias", alias)
        for stakeholder in sorted(doc.stakeholders, key=lambda s: s.id):
            with writer.block("stakeholder", stakeholder.id):
                writer.field("label", stakeholder.label)
                for alias in sorted(stakeholder.aliases):
                    writer.field("alias", alias)
                writer.field("question", stakeholder.question)
        for feature in sorted(doc.features, key=lambda f: f.id):
            with writer.block("feature", feature.id):
                writer.field("label", feature.label)
                for alias in sorted(feature.aliases):
                    writer.field("alias", alias)
                writer.field("question", feature.question)
        for issue in sorted(doc.issues, key=lambda i: i.id):
            emit_issue(writer, issue)
    return writer.text()
