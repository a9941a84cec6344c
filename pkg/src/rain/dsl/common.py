"""Shared grammar pieces: criteria, entity declarations, issue declarations.

These block shapes appear in more than one file kind (policies, graphs, and
issue-template libraries), so their parsing and canonical emission live here.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..model import AssessmentCriterion, FailOn, Feature, Norm, Stakeholder, TestKind, Value
from .reader import Block, BlockView, Diagnostics, Writer

CRITERION_FIELDS = {"kind", "fail-on", "prompt"}


@dataclass(frozen=True)
class IssueDecl:
    """A declared challenge: the seed of one norm.

    ``features`` are conjunctive — every listed feature must be present for
    the issue to arise.  Alternative triggering feature sets are authored as
    separate issues.
    """

    id: str
    description: str
    values: frozenset[str]
    stakeholders: frozenset[str]
    features: frozenset[str]
    criteria: tuple[AssessmentCriterion, ...]

    def to_norm(self, source: str) -> Norm:
        return Norm(
            id=self.id,
            description=self.description,
            values=self.values,
            stakeholders=self.stakeholders,
            features=self.features,
            criteria=self.criteria,
            source=source,
        )


def parse_criteria(view: BlockView, diags: Diagnostics, max_level: int | None = None) -> tuple[AssessmentCriterion, ...]:
    """Parse ``criterion <level>`` children, sorted by level, duplicates flagged."""
    parsed: list[AssessmentCriterion] = []
    seen_levels: set[int] = set()
    for block in view.children("criterion"):
        cv = BlockView(block, diags)
        level = cv.int_arg(0, "a criterion level")
        cv.no_extra_args(1)
        cv.check_known(field_keys=CRITERION_FIELDS)
        kind = cv.choice("kind", [k.value for k in TestKind], required=True)
        fail_on = cv.choice("fail-on", [f.value for f in FailOn], required=True)
        prompt = cv.text("prompt", required=True)
        if level is None or kind is None or fail_on is None or prompt is None:
            continue
        if level < 1:
            diags.error(block.line, block.column, "a criterion level of at least 1", str(level))
            continue
        if max_level is not None and level > max_level:
            diags.error(
                block.line, block.column, f"a criterion level within the scale (1..{max_level})", str(level)
            )
            continue
        if level in seen_levels:
            diags.error(block.line, block.column, "a distinct criterion level", str(level))
            continue
        seen_levels.add(level)
        parsed.append(AssessmentCriterion(level=level, kind=TestKind(kind), prompt=prompt, fail_on=FailOn(fail_on)))
    return tuple(sorted(parsed, key=lambda c: c.level))


def emit_criteria(writer: Writer, criteria: tuple[AssessmentCriterion, ...]):
    for criterion in criteria:
        with writer.block("criterion", str(criterion.level)):
            writer.field("kind", criterion.kind.value)
            writer.field("fail-on", criterion.fail_on.value)
            writer.field("prompt", criterion.prompt)


def parse_stakeholder(block: Block, diags: Diagnostics) -> Stakeholder | None:
    view = BlockView(block, diags)
    sid = view.slug_arg(0, "a stakeholder id")
    view.no_extra_args(1)
    view.check_known(field_keys={"label", "question", "alias"})
    label = view.text("label", default=default_label(sid))
    question = view.text("question", required=True)
    if sid is None or question is None:
        return None
    return Stakeholder(id=sid, label=label or sid, question=question, aliases=frozenset(view.texts("alias")))


def parse_feature(block: Block, diags: Diagnostics, staged: bool = False) -> Feature | None:
    view = BlockView(block, diags)
    fid = view.slug_arg(0, "a feature id")
    view.no_extra_args(1)
    view.check_known(field_keys={"label", "question", "alias", "staged"})
    label = view.text("label", default=default_label(fid))
    question = view.text("question", required=True)
    staged_field = view.flag("staged")
    if fid is None or question is None:
        return None
    return Feature(
        id=fid,
        label=label or fid,
        question=question,
        aliases=frozenset(view.texts("alias")),
        staged=staged or staged_field,
    )


def parse_value(block: Block, diags: Diagnostics) -> Value | None:
    """Standalone value declaration (graphs and issue libraries)."""
    view = BlockView(block, diags)
    vid = view.slug_arg(0, "a value id")
    view.no_extra_args(1)
    view.check_known(field_keys={"label", "alias", "source-hlv", "origin"})
    label = view.text("label", default=default_label(vid))
    source_hlvs = set()
    for f in [f for f in block.fields if f.key == "source-hlv"]:
        policy_id, _, hlv_label = f.value.partition(" ")
        if not policy_id or not hlv_label.strip():
            diags.error(f.line, f.column, "'source-hlv: <policy-id> <hlv label>'", f.value)
            continue
        source_hlvs.add((policy_id, hlv_label.strip()))
    origin = view.text("origin")
    if vid is None:
        return None
    return Value(
        id=vid,
        label=label or vid,
        aliases=frozenset(view.texts("alias")),
        source_hlvs=frozenset(source_hlvs),
        origin=origin,
    )


def default_label(entity_id: str | None) -> str:
    if not entity_id:
        return ""
    return " ".join(part.capitalize() for part in entity_id.split("-"))


def emit_entity_common(writer: Writer, entity) -> None:
    writer.field("label", entity.label)
    for alias in sorted(entity.aliases):
        writer.field("alias", alias)


def emit_value(writer: Writer, value: Value):
    with writer.block("value", value.id):
        emit_entity_common(writer, value)
        for policy_id, hlv_label in sorted(value.source_hlvs):
            writer.field("source-hlv", f"{policy_id} {hlv_label}")
        if value.origin:
            writer.field("origin", value.origin)


def emit_stakeholder(writer: Writer, stakeholder: Stakeholder):
    with writer.block("stakeholder", stakeholder.id):
        emit_entity_common(writer, stakeholder)
        writer.field("question", stakeholder.question)


def emit_feature(writer: Writer, feature: Feature):
    with writer.block("feature", feature.id):
        emit_entity_common(writer, feature)
        writer.field("question", feature.question)
        if feature.staged:
            writer.field("staged", "true")


def parse_issue(block: Block, diags: Diagnostics, max_level: int | None) -> IssueDecl | None:
    view = BlockView(block, diags)
    iid = view.slug_arg(0, "an issue id")
    view.no_extra_args(1)
    view.check_known(
        field_keys={"description", "values", "stakeholders", "features"},
        child_keywords={"criterion"},
    )
    description = view.text("description", required=True)
    values = view.id_list("values", required=True)
    stakeholders = view.id_list("stakeholders", required=True)
    features = view.id_list("features", required=True)
    criteria = parse_criteria(view, diags, max_level)
    if not view.children("criterion"):
        diags.error(block.line, block.column, "at least one criterion", block.keyword)
    if iid is None or description is None or not (values and stakeholders and features and criteria):
        return None
    return IssueDecl(
        id=iid,
        description=description,
        values=frozenset(values),
        stakeholders=frozenset(stakeholders),
        features=frozenset(features),
        criteria=criteria,
    )


def emit_issue(writer: Writer, issue: IssueDecl, keyword: str = "issue"):
    with writer.block(keyword, issue.id):
        writer.field("description", issue.description)
        writer.field("values", ", ".join(sorted(issue.values)))
        writer.field("stakeholders", ", ".join(sorted(issue.stakeholders)))
        writer.field("features", ", ".join(sorted(issue.features)))
        emit_criteria(writer, issue.criteria)


def issue_to_dict(issue: IssueDecl) -> dict:
    return {
        "id": issue.id,
        "description": issue.description,
        "values": sorted(issue.values),
        "stakeholders": sorted(issue.stakeholders),
        "features": sorted(issue.features),
        "criteria": [
            {"level": c.level, "kind": c.kind.value, "prompt": c.prompt, "fail_on": c.fail_on.value}
            for c in issue.criteria
        ],
    }


def issue_from_dict(data: dict) -> IssueDecl:
    return IssueDecl(
        id=data["id"],
        description=data["description"],
        values=frozenset(data["values"]),
        stakeholders=frozenset(data["stakeholders"]),
        features=frozenset(data["features"]),
        criteria=tuple(
            AssessmentCriterion(
                level=int(c["level"]),
                kind=TestKind(c["kind"]),
                prompt=c["prompt"],
                fail_on=FailOn(c["fail_on"]),
            )
            for c in data["criteria"]
        ),
    )
