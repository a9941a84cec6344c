"""Issue-template libraries (``.rainissues``) for the expansion algorithm.

A library is a set of (feature-pattern, value-pattern, stakeholder-pattern)
entries, each carrying one issue declaration; patterns are exact ids or
``*``.  Libraries may also declare entities (values, stakeholders, features)
so their issues can reference ids that are not in the graph yet — such
values carry the library's id as an expansion provenance mark.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

from ..model import Entity, Feature, Stakeholder, Value
from .common import IssueDecl, emit_feature, emit_issue, emit_stakeholder, emit_value, parse_feature, parse_issue, parse_stakeholder, parse_value
from .reader import BlockView, Diagnostics, Writer, single_root


@dataclass(frozen=True)
class TemplateEntry:
    name: str
    feature_pattern: str
    value_pattern: str
    stakeholder_pattern: str
    issue: IssueDecl

    def matches(self, feature_id: str, value_id: str, stakeholder_id: str) -> bool:
        return (
            self.feature_pattern in ("*", feature_id)
            and self.value_pattern in ("*", value_id)
            and self.stakeholder_pattern in ("*", stakeholder_id)
        )


@dataclass(frozen=True)
class IssueTemplateLibrary:
    id: str
    entries: tuple[TemplateEntry, ...]
    declarations: dict[str, dict[str, Entity]] = dc_field(default_factory=dict)

    def declared(self, kind: str, entity_id: str) -> Entity | None:
        return self.declarations.get(kind, {}).get(entity_id)


def parse_issue_templates(text: str) -> IssueTemplateLibrary:
    root = single_root(text, "issue-templates", "an issue-template library")
    diags = Diagnostics()
    view = BlockView(root, diags)
    library_id = view.slug_arg(0, "a library id")
    view.no_extra_args(1)
    view.check_known(child_keywords={"value", "stakeholder", "feature", "template"})

    declarations: dict[str, dict[str, Entity]] = {"values": {}, "stakeholders": {}, "features": {}}
    for block in view.children("value"):
        value = parse_value(block, diags)
        if value is not None:
            if not value.source_hlvs and value.origin is None:
                value = replace(value, origin=f"expansion:{library_id}")
            declarations["values"][value.id] = value
    for block in view.children("stakeholder"):
        stakeholder = parse_stakeholder(block, diags)
        if stakeholder is not None:
            declarations["stakeholders"][stakeholder.id] = stakeholder
    for block in view.children("feature"):
        feature = parse_feature(block, diags)
        if feature is not None:
            declarations["features"][feature.id] = feature

    entries = []
    seen: dict[str, int] = {}
    for block in view.children("template"):
        tv = BlockView(block, diags)
        name = tv.slug_arg(0, "a template name")
        tv.no_extra_args(1)
        tv.check_known(field_keys={"feature", "value", "stakeholder"}, child_keywords={"issue"})
        feature_pattern = _pattern(tv, "feature", diags)
        value_pattern = _pattern(tv, "value", diags)
        stakeholder_pattern = _pattern(tv, "stakeholder", diags)
        issue_blocks = tv.children("issue")
        if len(issue_blocks) != 1:
            diags.error(block.line, block.column, "exactly one issue per template", name or "template")
            continue
        issue = parse_issue(issue_blocks[0], diags, max_level=None)
        if name is None or issue is None:
            continue
        if name in seen:
            diags.error(block.line, block.column, f"a unique template name (duplicate of line {seen[name]})", name)
            continue
        seen[name] = block.line
        entries.append(
            TemplateEntry(
                name=name,
                feature_pattern=feature_pattern,
                value_pattern=value_pattern,
                stakeholder_pattern=stakeholder_pattern,
                issue=issue,
            )
        )

    diags.raise_if_any()
    return IssueTemplateLibrary(
        id=library_id,
        entries=tuple(sorted(entries, key=lambda e: e.name)),
        declarations=declarations,
    )


def _pattern(view: BlockView, key: str, diags: Diagnostics) -> str:
    value = view.text(key, default="*")
    if value in (None, "", "*"):
        return "*"
    from ..model import is_slug

    if not is_slug(value):
        hit = next(f for f in view.block.fields if f.key == key)
        diags.error(hit.line, hit.column, f"an exact id or '*' for '{key}'", value)
        return "*"
    return value


def serialize_issue_templates(library: IssueTemplateLibrary) -> str:
    writer = Writer()
    with writer.block("issue-templates", library.id):
        for value in sorted(library.declarations.get("values", {}).values(), key=lambda v: v.id):
            emit_value(writer, value)
        for stakeholder in sorted(library.declarations.get("stakeholders", {}).values(), key=lambda s: s.id):
            emit_stakeholder(writer, stakeholder)
        for feature in sorted(library.declarations.get("features", {}).values(), key=lambda f: f.id):
            emit_feature(writer, feature)
        for entry in sorted(library.entries, key=lambda e: e.name):
            with writer.block("template", entry.name):
                writer.field("feature", entry.feature_pattern)
                writer.field("value", entry.value_pattern)
                writer.field("stakeholder", entry.stakeholder_pattern)
                emit_issue(writer, entry.issue)
    return writer.text()
