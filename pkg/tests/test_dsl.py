import random

import pytest

from rain.algorithms import decompose
from rain.dsl import (
    parse_graph,
    parse_issue_templates,
    parse_policy,
    parse_projection,
    serialize_graph,
    serialize_issue_templates,
    serialize_policy,
    serialize_projection,
)
from rain.dsl.projection import Aggregator
from rain.dsl.reader import ParseFailure
from rain.errors import IntegrityError
from rain.model import make_graph

from conftest import fixture_text
from genutil import gen_policy


def test_gtai_fixture_parses_to_three_values_one_issue(gtai_policy):
    assert gtai_policy.id == "gtai"
    assert len(gtai_policy.component_values()) == 3
    assert {decl.id for _, decl in gtai_policy.component_values()} == {
        "right-to-privacy",
        "data-protection",
        "data-governance",
    }
    assert len(gtai_policy.issues) == 1
    issue = gtai_policy.issues[0]
    assert issue.id == "pd-gdpr"
    assert issue.features == {"personal-data"}


def test_empty_document_fails_at_origin():
    with pytest.raises(ParseFailure) as exc:
        parse_policy("")
    assert (exc.value.errors[0].line, exc.value.errors[0].column) == (1, 1)


def test_criterion_level_beyond_scale_rejected():
    source = fixture_text("gtai.rainpol").replace("criterion 3", "criterion 4")
    with pytest.raises(ParseFailure) as exc:
        parse_policy(source)
    assert any("within the scale" in e.expected for e in exc.value.errors)


def test_duplicate_issue_id_rejected():
    source = fixture_text("gtai.rainpol")
    duplicated = source + source[source.index("  issue pd-gdpr"):]
    with pytest.raises(ParseFailure) as exc:
        parse_policy(duplicated)
    assert any("duplicate" in e.expected for e in exc.value.errors)


def test_tab_indentation_rejected():
    with pytest.raises(ParseFailure) as exc:
        parse_policy("policy p\n\ttitle: broken\n")
    assert exc.value.errors[0].expected == "spaces for indentation"


def test_policy_round_trip(gtai_policy):
    text = serialize_policy(gtai_policy)
    assert parse_policy(text) == gtai_policy
    assert serialize_policy(parse_policy(text)) == text


def test_graph_round_trip_is_byte_stable(gtai_graph, elderly_graph):
    for graph in (gtai_graph, elderly_graph):
        text = serialize_graph(graph)
        reparsed = parse_graph(text)
        assert serialize_graph(reparsed) == text
        assert reparsed.evolve(revision=graph.revision) == graph


def test_empty_graph_serializes_minimal_document():
    text = serialize_graph(make_graph())
    assert text.startswith("rain-graph\n  scale: 3\n")
    assert parse_graph(text) == make_graph()


def test_graph_with_dangling_norm_reference_is_integrity_error(gtai_graph):
    text = serialize_graph(gtai_graph).replace("features: personal-data", "features: teleportation")
    with pytest.raises(IntegrityError) as exc:
        parse_graph(text)
    assert "teleportation" in str(exc.value)


def test_projection_fixture_parses(gtai_projection):
    rule = next(r for r in gtai_projection.rules if r.item_id == "GTAI-Q-privacy-1")
    assert rule.query.values == {"data-governance"}
    assert rule.query.aggregator is Aggregator.WORST_VIOLATION


def test_single_rule_projection():
    text = (
        "projection tiny\n"
        "  external: a guideline\n"
        "  rule ITEM-1\n"
        "    values: data-governance\n"
        "    aggregator: worst-violation\n"
    )
    ruleset = parse_projection(text)
    assert len(ruleset.rules) == 1


def test_empty_rule_set_document():
    ruleset = parse_projection("projection empty-set\n  external: nothing mapped yet\n")
    assert ruleset.rules == ()


def test_rule_without_filter_or_select_all_rejected():
    text = "projection bad\n  external: x\n  rule R1\n    aggregator: maturity\n"
    with pytest.raises(ParseFailure) as exc:
        parse_projection(text)
    assert any("select: all" in e.expected for e in exc.value.errors)


def test_issue_library_round_trip(issue_library):
    text = serialize_issue_templates(issue_library)
    reparsed = parse_issue_templates(text)
    assert reparsed.entries == issue_library.entries
    assert serialize_issue_templates(reparsed) == text


def test_projection_round_trip(gtai_projection, safety_projection):
    for ruleset in (gtai_projection, safety_projection):
        text = serialize_projection(ruleset)
        assert parse_projection(text) == ruleset
        assert serialize_projection(parse_projection(text)) == text


def test_canonical_form_ignores_declaration_order(gtai_text, gtai_policy):
    # Move the issue block before the hlv block: same parsed document.
    lines = gtai_text.splitlines()
    issue_start = next(i for i, line in enumerate(lines) if line.startswith("  issue"))
    hlv_start = next(i for i, line in enumerate(lines) if line.startswith("  hlv"))
    permuted = (
        lines[:hlv_start]
        + lines[issue_start:]
        + lines[hlv_start:issue_start]
    )
    reparsed = parse_policy("\n".join(permuted) + "\n")
    assert reparsed == gtai_policy
    assert serialize_policy(reparsed) == serialize_policy(gtai_policy)


def test_error_positions_stay_inside_input():
    bad_documents = [
        "",
        "policy\n",
        "policy p!\n",
        "policy p\n   title: odd indent\n",
        "policy p\n\tbad tab\n",
        "stray: field\n",
        "policy p\n  hlv h\n    label: H\n",
        "policy p\n  scale: many\n  hlv h\n    value v\n",
        "projection p\n  rule R\n    aggregator: wrongest\n",
        "rain-graph\n  value v\n    nonsense: field\n",
        "issue-templates lib\n  template t\n    feature: Not A Slug\n",
    ]
    for source in bad_documents:
        with pytest.raises(ParseFailure) as exc:
            for parser in (parse_policy, parse_graph, parse_projection, parse_issue_templates):
                try:
                    parser(source)
                except ParseFailure as failure:
                    raise failure
                except IntegrityError:
                    continue
            raise AssertionError(f"no parser rejected {source!r}")
        line_count = max(1, source.count("\n") + 1)
        for error in exc.value.errors:
            assert 1 <= error.line <= line_count, (source, error)
            assert error.column >= 1


def test_random_graph_round_trips():
    rng = random.Random(4242)
    for _ in range(25):
        graph = make_graph()
        for _ in range(rng.randint(1, 2)):
            graph, _ = decompose(graph, gen_policy(rng))
        text = serialize_graph(graph)
        assert serialize_graph(parse_graph(text)) == text
