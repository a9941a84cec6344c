"""Acceptance suite: one test per exit criterion, each printing a verdict
line and holding to its wall-clock budget.  Run with ``pytest -s`` to see
the per-criterion lines.
"""

import random
import time
from contextlib import contextmanager

from fastapi.testclient import TestClient

from rain.algorithms import BatchAnswerSource, TemplateIssueSource, covers_features, covers_policy, decompose, expand
from rain.canonical import digest_obj
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
from rain.dsl.common import IssueDecl
from rain.model import AssessmentCriterion, FailOn, Feature, TestKind, make_graph
from rain.results import aggregate_value, bundle_json, is_ethical_compliant, project, report_bundle, what_if
from rain.session import INCOMPLETE, Activation, Presence, active_norms, new_session
from rain.store import Store

from conftest import build_elderly_session, fixture_text
from genutil import (
    all_context_assignments,
    gen_gated_graph,
    gen_policy,
    gen_session_state,
    oracle_group_report,
    oracle_status,
    oracle_violation,
    session_from_state,
)


@contextmanager
def criterion(name: str, budget_seconds: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL {name} ({time.perf_counter() - start:.2f}s)")
        raise
    elapsed = time.perf_counter() - start
    print(f"PASS {name} ({elapsed:.2f}s, budget {budget_seconds:.0f}s)")
    assert elapsed < budget_seconds, f"{name} exceeded its {budget_seconds}s budget: {elapsed:.2f}s"


class _DeterministicSource:
    """Total issue source whose answers are a pure function of the triple."""

    name = "det"

    def issues_for(self, feature_id, value_id, stakeholder_id):
        digest = digest_obj([feature_id, value_id, stakeholder_id])
        if int(digest[:4], 16) % 4 != 0:
            return []
        return [
            IssueDecl(
                id=f"iss-{digest[:10]}",
                description=f"{feature_id} challenges {value_id} for {stakeholder_id}",
                values=frozenset({value_id}),
                stakeholders=frozenset({stakeholder_id}),
                features=frozenset({feature_id}),
                criteria=(
                    AssessmentCriterion(1, TestKind.QUIZ, "requirement holds?", FailOn.NO),
                    AssessmentCriterion(2, TestKind.EVIDENCE, "record exists?", FailOn.ABSENT),
                ),
            )
        ]

    def declared(self, kind, entity_id):
        return None


def test_idempotency_suite(gtai_policy, elderly_graph, issue_library, new_features):
    with criterion("idempotency: second decompose and second expand change nothing", 5.0):
        rng = random.Random(1002)
        graph, _ = decompose(make_graph(), gtai_policy)
        _, delta = decompose(graph, gtai_policy)
        assert delta.empty

        expanded, report = expand(elderly_graph, new_features, TemplateIssueSource(issue_library))
        assert report.empty and expanded.revision == elderly_graph.revision

        source = _DeterministicSource()
        for index in range(100):
            policy = gen_policy(rng)
            graph, first = decompose(make_graph(), policy)
            assert not first.empty
            _, second = decompose(graph, policy)
            assert second.empty, f"policy {policy.id} (case {index}) was not idempotent"

            extra = Feature(id="probe-feature", label="Probe", question="probe?", staged=True)
            expanded, first_report = expand(graph, [extra], source)
            assert first_report.completed
            again, second_report = expand(expanded, [extra], source)
            assert second_report.empty, f"expansion on {policy.id} (case {index}) was not idempotent"
            assert again.revision == expanded.revision


def test_coverage_semantics(gtai_policy, safety_policy, gtai_graph, elderly_graph):
    with criterion("coverage: no-op merge test and reviewed-ledger test", 1.0):
        covered, delta = covers_policy(gtai_graph, gtai_policy)
        assert covered and delta.empty
        covered, _ = covers_policy(elderly_graph, gtai_policy)
        assert covered
        covered, _ = covers_policy(elderly_graph, safety_policy)
        assert covered

        # Removing any single norm or value breaks coverage.
        for norm in gtai_graph.norms:
            poorer = gtai_graph.evolve(norms=tuple(n for n in gtai_graph.norms if n.id != norm.id))
            covered, delta = covers_policy(poorer, gtai_policy)
            assert not covered and norm.id in delta.added["norms"]
        for value in gtai_graph.values:
            poorer = gtai_graph.evolve(values=tuple(v for v in gtai_graph.values if v.id != value.id))
            covered, delta = covers_policy(poorer, gtai_policy)
            assert not covered and value.id in delta.added["values"]

        # Feature coverage is exactly "every triple reviewed".
        feature_ids = [f.id for f in elderly_graph.features]
        covered, pending = covers_features(elderly_graph, feature_ids)
        assert covered and not pending
        covered, pending = covers_features(elderly_graph, ["passive-recording"])
        assert covered and not pending  # pruned with records retained
        for record in elderly_graph.reviewed:
            stripped = elderly_graph.evolve(
                reviewed=tuple(r for r in elderly_graph.reviewed if r.triple != record.triple)
            )
            covered, pending = covers_features(stripped, [record.feature])
            assert not covered and pending == (record.triple,)
        covered, pending = covers_features(elderly_graph, ["never-seen"])
        assert not covered and len(pending) == len(elderly_graph.values) * len(elderly_graph.stakeholders)


def test_activation_oracle():
    with criterion("activation: engine equals brute force over all 3^n contexts", 30.0):
        rng = random.Random(3001)
        sizes = [10, 9, 8] + [rng.randint(2, 7) for _ in range(47)]
        checked_graphs = 0
        for size in sizes:
            graph = gen_gated_graph(rng, entities=size)
            entity_ids = [f.id for f in graph.features] + [s.id for s in graph.stakeholders]
            assert len(entity_ids) <= 10 and len(graph.norms) <= 8
            for context in all_context_assignments(entity_ids):
                session = session_from_state(graph, context, {})
                statuses = active_norms(session)
                for norm in graph.norms:
                    assert statuses[norm.id].state.value == oracle_status(norm, context)
            checked_graphs += 1
        assert checked_graphs >= 50


def test_scoring_laws():
    with criterion("scoring: max-failed violations, L+1-w maturity, incomplete dominance", 10.0):
        rng = random.Random(4001)
        sessions_checked = 0
        while sessions_checked < 1000:
            graph = gen_gated_graph(rng, max_entities=8, max_norms=8)
            for _ in range(10):
                context, answers = gen_session_state(rng, graph)
                session = session_from_state(graph, context, answers)
                statuses = active_norms(session)
                active_contributions: dict[str, list] = {v.id: [] for v in graph.values}
                for norm in graph.norms:
                    expected_state = oracle_status(norm, context)
                    assert statuses[norm.id].state.value == expected_state
                    if expected_state == "active":
                        violation = oracle_violation(norm, answers)
                        assert statuses[norm.id].violation == violation
                        for value_id in norm.values:
                            active_contributions[value_id].append((norm.id, violation))
                for value_id, contributions in active_contributions.items():
                    expected_worst, expected_maturity = oracle_group_report(
                        graph.scale.levels, contributions
                    )
                    report = aggregate_value(session, value_id)
                    assert report.worst_violation == expected_worst
                    assert report.maturity == expected_maturity
                    if any(v == INCOMPLETE for _, v in contributions):
                        assert report.maturity == INCOMPLETE
                sessions_checked += 1


def test_elderly_care_end_to_end(elderly_graph, gtai_projection, safety_projection):
    with criterion("running example: projections, compliance, and the what-if", 1.0):
        session = build_elderly_session(elderly_graph)
        statuses = active_norms(session)
        assert all(s.state is Activation.ACTIVE for s in statuses.values())
        assert statuses["rp-privacy"].violation == elderly_graph.scale.levels

        gtai_items = {i["item"]: i["result"] for i in project(session, gtai_projection)}
        assert gtai_items["GTAI-Q-privacy-2"] == 1  # minimum maturity
        assert gtai_items["GTAI-Q-privacy-3"] == 1
        for value_id in ("right-to-privacy", "data-protection", "data-governance"):
            assert aggregate_value(session, value_id).maturity == 1
        safety_items = {i["item"]: i["result"] for i in project(session, safety_projection)}
        assert safety_items["SAFE-1"] == elderly_graph.scale.levels + 1

        assert is_ethical_compliant(session) is False

        journal_before = session.journal
        hypothetical = what_if(session, {"remote-processing": Presence.ABSENT})
        baseline = report_bundle(session)
        base = {v["id"]: v["maturity"] for v in baseline["values"]}
        hypo = {v["id"]: v["maturity"] for v in hypothetical["values"]}
        for value_id in ("right-to-privacy", "data-protection", "data-governance"):
            assert hypo[value_id] > base[value_id]
        assert session.journal == journal_before


def test_dsl_and_persistence_round_trips(tmp_path, gtai_graph, elderly_graph):
    with criterion("round-trips: parse/serialize identity and journal replay", 5.0):
        for name, parser, serializer in (
            ("gtai.rainpol", parse_policy, serialize_policy),
            ("local-safety.rainpol", parse_policy, serialize_policy),
            ("new-features.rain", parse_graph, serialize_graph),
            ("home-automation.rainissues", parse_issue_templates, serialize_issue_templates),
            ("gtai-assessment.rainproj", parse_projection, serialize_projection),
            ("safety-standard.rainproj", parse_projection, serialize_projection),
        ):
            parsed = parser(fixture_text(name))
            canonical = serializer(parsed)
            assert serializer(parser(canonical)) == canonical

        rng = random.Random(6001)
        for _ in range(50):
            graph = make_graph()
            for _ in range(rng.randint(1, 2)):
                graph, _ = decompose(graph, gen_policy(rng))
            text = serialize_graph(graph)
            assert serialize_graph(parse_graph(text)) == text

        for graph in (gtai_graph, elderly_graph):
            text = serialize_graph(graph)
            assert serialize_graph(parse_graph(text)) == text

        store = Store(tmp_path / "store")
        store.save_graph("elderly", elderly_graph)
        created = store.create_session("audit", "elderly")
        reference = build_elderly_session(created.graph, session_id="audit")
        store.append_session_events("audit", list(reference.journal), 0)
        replayed = store.replay("audit")
        assert replayed.complete
        assert bundle_json(report_bundle(replayed.session)) == bundle_json(report_bundle(reference))


def test_api_equivalence(tmp_path, elderly_graph, new_features):
    with criterion("API equivalence: HTTP-driven run matches the library byte for byte", 5.0):
        from rain.service import create_app
        from test_service import _drive_fixture_graph, _drive_fixture_session

        app = create_app(Store(tmp_path / "store"))
        with TestClient(app) as client:
            _drive_fixture_graph(client, new_features)
            _drive_fixture_session(client, elderly_graph)
            for name in ("gtai-assessment", "safety-standard"):
                response = client.post(f"/projections?id={name}", content=fixture_text(f"{name}.rainproj"))
                assert response.status_code == 201
            api_bytes = client.get(
                "/sessions/assessment/report",
                params=[("projection", "gtai-assessment"), ("projection", "safety-standard")],
            ).content

        library_session = build_elderly_session(elderly_graph, session_id="assessment")
        rulesets = tuple(
            parse_projection(fixture_text(f"{name}.rainproj"))
            for name in ("gtai-assessment", "safety-standard")
        )
        library_bytes = bundle_json(report_bundle(library_session, rulesets)).encode("utf-8")
        assert api_bytes == library_bytes
