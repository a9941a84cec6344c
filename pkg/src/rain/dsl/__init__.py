"""Text formats: policies, graphs, projections, and issue-template libraries.

File extensions: ``.rainpol`` (policy), ``.rain`` (graph), ``.rainproj``
(projection rule set), ``.rainissues`` (issue templates).  The grammar is
documented in ``docs/grammar.md``.
"""

from .common import IssueDecl, issue_from_dict, issue_to_dict
from .graph_text import graph_digest, parse_graph, serialize_graph
from .issues import IssueTemplateLibrary, TemplateEntry, parse_issue_templates, serialize_issue_templates
from .policy import HlvDecomposition, PolicyDoc, ValueDecl, parse_policy, serialize_policy
from .projection import (
    Aggregator,
    GraphQuery,
    ProjectionRule,
    ProjectionRuleSet,
    parse_projection,
    serialize_projection,
)
from .reader import ParseError, ParseFailure

__all__ = [
    "Aggregator",
    "GraphQuery",
    "HlvDecomposition",
    "IssueDecl",
    "IssueTemplateLibrary",
    "ParseError",
    "ParseFailure",
    "PolicyDoc",
    "ProjectionRule",
    "ProjectionRuleSet",
    "TemplateEntry",
    "ValueDecl",
    "graph_digest",
    "issue_from_dict",
    "issue_to_dict",
    "parse_graph",
    "parse_issue_templates",
    "parse_policy",
    "parse_projection",
    "serialize_graph",
    "serialize_issue_templates",
    "serialize_policy",
    "serialize_projection",
]
