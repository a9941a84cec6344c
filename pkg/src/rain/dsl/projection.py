"""Projection rule sets (``.rainproj``): mapping results onto external policies.

Each rule binds one external requirement item to a query over graph/session
state.  The query language is deliberately minimal: conjunctive id filters
over values, stakeholders, features, and source policy, plus one of three
aggregators.  Filters bind to graph ids at evaluation time, not parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .reader import BlockView, Diagnostics, Writer, single_root

ITEM_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class Aggregator(str, Enum):
    WORST_VIOLATION = "worst-violation"
    MATURITY = "maturity"
    NORM_LIST = "norm-list"


@dataclass(frozen=True)
class GraphQuery:
    """Conjunctive filter over active norms plus an aggregator."""

    aggregator: Aggregator
    values: frozenset[str] | None = None
    stakeholders: frozenset[str] | None = None
    features: frozenset[str] | None = None
    source_policy: str | None = None
    select_all: bool = False

    @property
    def has_filter(self) -> bool:
        return any(f is not None for f in (self.values, self.stakeholders, self.features, self.source_policy))


@dataclass(frozen=True)
class ProjectionRule:
    item_id: str
    query: GraphQuery


@dataclass(frozen=True)
class ProjectionRuleSet:
    id: str
    external: str
    rules: tuple[ProjectionRule, ...]


def parse_projection(text: str) -> ProjectionRuleSet:
    root = single_root(text, "projection", "a projection rule set")
    diags = Diagnostics()
    view = BlockView(root, diags)
    proj_id = view.slug_arg(0, "a projection id")
    view.no_extra_args(1)
    view.check_known(field_keys={"external"}, child_keywords={"rule"})
    external = view.text("external", required=True)

    rules = []
    seen: dict[str, int] = {}
    for block in view.children("rule"):
        rv = BlockView(block, diags)
        item_id = rv.name_arg(0, "an external item id")
        rv.no_extra_args(1)
        rv.check_known(field_keys={"values", "stakeholders", "features", "policy", "select", "aggregator"})
        if item_id is not None and not ITEM_ID_RE.match(item_id):
            diags.error(block.line, block.column, "an external item id (letters, digits, '.', '_', '-')", item_id)
            item_id = None
        if item_id is not None:
            if item_id in seen:
                diags.error(block.line, block.column, f"a unique item id (duplicate of line {seen[item_id]})", item_id)
                item_id = None
            else:
                seen[item_id] = block.line
        values = rv.id_list("values")
        stakeholders = rv.id_list("stakeholders")
        features = rv.id_list("features")
        policy_field = rv.text("policy")
        select = rv.choice("select", ("all",))
        aggregator = rv.choice("aggregator", [a.value for a in Aggregator], required=True)
        if item_id is None or aggregator is None:
            continue
        query = GraphQuery(
            aggregator=Aggregator(aggregator),
            values=frozenset(values) if values else None,
            stakeholders=frozenset(stakeholders) if stakeholders else None,
            features=frozenset(features) if features else None,
            source_policy=policy_field,
            select_all=select == "all",
        )
        if not query.has_filter and not query.select_all:
            diags.error(block.line, block.column, "at least one filter or 'select: all'", item_id)
            continue
        rules.append(ProjectionRule(item_id=item_id, query=query))

    diags.raise_if_any()
    return ProjectionRuleSet(
        id=proj_id,
        external=external or "",
        rules=tuple(sorted(rules, key=lambda r: r.item_id)),
    )


def serialize_projection(ruleset: ProjectionRuleSet) -> str:
    writer = Writer()
    with writer.block("projection", ruleset.id):
        writer.field("external", ruleset.external)
        for rule in sorted(ruleset.rules, key=lambda r: r.item_id):
            with writer.block("rule", rule.item_id):
                query = rule.query
                if query.values:
                    writer.field("values", ", ".join(sorted(query.values)))
                if query.stakeholders:
                    writer.field("stakeholders", ", ".join(sorted(query.stakeholders)))
                if query.features:
                    writer.field("features", ", ".join(sorted(query.features)))
                if query.source_policy:
                    writer.field("policy", query.source_policy)
                if query.select_all:
                    writer.field("select", "all")
                writer.field("aggregator", query.aggregator.value)
    return writer.text()
