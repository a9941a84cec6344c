"""Graph documents (``.rain``): parsing, canonical serialization, digests.

The canonical form is the graph's identity: entities sorted by id, fields in
a fixed order, no volatile data (the revision counter is store metadata and
is deliberately not serialized).  Coverage's "no change" test and the store's
content digests are byte comparisons over this form.
"""

from __future__ import annotations

import re

from ..canonical import digest_text
from ..errors import IntegrityError
from ..graph import validate_graph
from ..model import (
    MaturityScale,
    Norm,
    RainGraph,
    ReviewedIntersection,
    default_level_definitions,
    make_graph,
)
from .common import (
    emit_criteria,
    emit_feature,
    emit_stakeholder,
    emit_value,
    parse_criteria,
    parse_feature,
    parse_stakeholder,
    parse_value,
)
from .reader import BlockView, Diagnostics, Writer, single_root

GRAPH_FIELDS = {"scale", "policies"}
GRAPH_FIELD_PATTERNS = (r"^level [0-9]+$",)
GRAPH_BLOCKS = {"value", "stakeholder", "feature", "norm", "reviewed"}
_LEVEL_KEY_RE = re.compile(r"^level ([0-9]+)$")


def parse_graph(text: str) -> RainGraph:
    """Parse a graph document; dangling references raise an integrity error."""
    root = single_root(text, "rain-graph", "a graph document")
    diags = Diagnostics()
    view = BlockView(root, diags)
    view.no_extra_args(0)
    view.check_known(field_keys=GRAPH_FIELDS, field_patterns=GRAPH_FIELD_PATTERNS, child_keywords=GRAPH_BLOCKS)

    levels = view.int_value("scale", default=3)
    if levels is not None and levels < 1:
        diags.error(root.line, root.column, "a scale of at least 1", str(levels))
        levels = 3
    definitions = list(default_level_definitions(levels or 3))
    for field in root.fields:
        match = _LEVEL_KEY_RE.match(field.key)
        if not match:
            continue
        k = int(match.group(1))
        if not 1 <= k <= (levels or 3):
            diags.error(field.line, field.column, f"a level between 1 and {levels}", str(k))
            continue
        definitions[k - 1] = field.value
    scale = MaturityScale(levels=levels or 3, level_definitions=tuple(definitions))

    values = [v for b in view.children("value") if (v := parse_value(b, diags))]
    stakeholders = [s for b in view.children("stakeholder") if (s := parse_stakeholder(b, diags))]
    features = [f for b in view.children("feature") if (f := parse_feature(b, diags))]

    norms = []
    for block in view.children("norm"):
        nv = BlockView(block, diags)
        nid = nv.slug_arg(0, "a norm id")
        nv.no_extra_args(1)
        nv.check_known(
            field_keys={"description", "values", "stakeholders", "features", "source"},
            child_keywords={"criterion"},
        )
        description = nv.text("description", required=True)
        norm_values = nv.id_list("values", required=True)
        norm_stakeholders = nv.id_list("stakeholders", required=True)
        norm_features = nv.id_list("features", required=True)
        source = nv.text("source", required=True)
        criteria = parse_criteria(nv, diags, max_level=scale.levels)
        if not nv.children("criterion"):
            diags.error(block.line, block.column, "at least one criterion", block.keyword)
        if nid is None or description is None or source is None:
            continue
        if not (norm_values and norm_stakeholders and norm_features and criteria):
            continue
        norms.append(
            Norm(
                id=nid,
                description=description,
                values=frozenset(norm_values),
                stakeholders=frozenset(norm_stakeholders),
                features=frozenset(norm_features),
                criteria=criteria,
                source=source,
            )
        )

    reviewed = []
    for block in view.children("reviewed"):
        rv = BlockView(block, diags)
        feature_id = rv.slug_arg(0, "a feature id")
        value_id = rv.slug_arg(1, "a value id")
        stakeholder_id = rv.slug_arg(2, "a stakeholder id")
        rv.no_extra_args(3)
        rv.check_known(field_keys={"outcome", "norms"})
        outcome = rv.choice("outcome", ("no-issue",))
        norm_ids = rv.id_list("norms")
        if outcome is None and not norm_ids:
            diags.error(block.line, block.column, "an 'outcome: no-issue' field or a 'norms' field", block.keyword)
            continue
        if outcome is not None and norm_ids:
            diags.error(block.line, block.column, "either 'outcome: no-issue' or 'norms', not both", block.keyword)
            continue
        if feature_id is None or value_id is None or stakeholder_id is None:
            continue
        reviewed.append(
            ReviewedIntersection(
                feature=feature_id,
                value=value_id,
                stakeholder=stakeholder_id,
                norms=frozenset(norm_ids),
            )
        )

    policies = view.id_list("policies")
    diags.raise_if_any()

    graph = make_graph(
        scale=scale,
        values=values,
        stakeholders=stakeholders,
        features=features,
        norms=norms,
        reviewed=reviewed,
        policies=policies,
    )
    violations = validate_graph(graph)
    if violations:
        raise IntegrityError(
            "graph document violates invariants: " + "; ".join(str(v) for v in violations),
            ids=tuple(sorted({v.entity_id for v in violations})),
        )
    return graph


def serialize_graph(graph: RainGraph) -> str:
    """Canonical text form; byte-identical for content-identical graphs."""
    writer = Writer()
    with writer.block("rain-graph"):
        writer.field("scale", str(graph.scale.levels))
        for k, definition in enumerate(graph.scale.level_definitions, start=1):
            writer.field(f"level {k}", definition)
        if graph.policies:
            writer.field("policies", ", ".join(graph.policies))
        for value in graph.values:
            emit_value(writer, value)
        for stakeholder in graph.stakeholders:
            emit_stakeholder(writer, stakeholder)
        for feature in graph.features:
            emit_feature(writer, feature)
        for norm in graph.norms:
            with writer.block("norm", norm.id):
                writer.field("description", norm.description)
                writer.field("values", ", ".join(sorted(norm.values)))
                writer.field("stakeholders", ", ".join(sorted(norm.stakeholders)))
                writer.field("features", ", ".join(sorted(norm.features)))
                writer.field("source", norm.source)
                emit_criteria(writer, norm.criteria)
        for record in graph.reviewed:
            with writer.block("reviewed", record.feature, record.value, record.stakeholder):
                if record.no_issue:
                    writer.field("outcome", "no-issue")
                else:
                    writer.field("norms", ", ".join(sorted(record.norms)))
    return writer.text()


def graph_digest(graph: RainGraph) -> str:
    return digest_text(serialize_graph(graph))
