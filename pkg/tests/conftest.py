from pathlib import Path

import pytest

from rain.algorithms import TemplateIssueSource, decompose, expand
from rain.dsl import parse_graph, parse_issue_templates, parse_policy, parse_projection
from rain.model import make_graph
from rain.session import Outcome, Presence, assert_context, new_session, record_answer

FIXTURES = Path(__file__).parent / "fixtures"

ELDERLY_FEATURES = (
    "anthropomorphic-interaction",
    "hazardous-robotics",
    "language-dependence",
    "personal-data",
    "remote-processing",
    "vulnerable-end-users",
)
ELDERLY_STAKEHOLDERS = ("auditor", "developer", "end-user", "procurer")

# The elderly-care answer sheet: remote processing fails at the top level,
# three further level-1 shortcomings, everything else passes.
FAILED_CRITERIA = {
    ("rp-privacy", 3),
    ("pd-gdpr", 1),
    ("pd-minimisation", 1),
    ("anthro-transparency", 1),
}


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def gtai_text():
    return fixture_text("gtai.rainpol")


@pytest.fixture(scope="session")
def gtai_policy(gtai_text):
    return parse_policy(gtai_text)


@pytest.fixture(scope="session")
def safety_policy():
    return parse_policy(fixture_text("local-safety.rainpol"))


@pytest.fixture(scope="session")
def issue_library():
    return parse_issue_templates(fixture_text("home-automation.rainissues"))


@pytest.fixture(scope="session")
def new_features():
    return parse_graph(fixture_text("new-features.rain")).features


@pytest.fixture(scope="session")
def gtai_graph(gtai_policy):
    graph, _ = decompose(make_graph(), gtai_policy)
    return graph


@pytest.fixture(scope="session")
def elderly_graph(gtai_policy, safety_policy, issue_library, new_features):
    graph, _ = decompose(make_graph(), gtai_policy)
    graph, _ = decompose(graph, safety_policy)
    graph, report = expand(graph, new_features, TemplateIssueSource(issue_library))
    assert report.completed
    return graph


@pytest.fixture(scope="session")
def gtai_projection():
    return parse_projection(fixture_text("gtai-assessment.rainproj"))


@pytest.fixture(scope="session")
def safety_projection():
    return parse_projection(fixture_text("safety-standard.rainproj"))


def build_elderly_session(graph, session_id="elderly-care"):
    """Context and answers of the running example, applied to a graph."""
    session = new_session(session_id, graph)
    for entity_id in ELDERLY_FEATURES + ELDERLY_STAKEHOLDERS:
        session = assert_context(session, entity_id, Presence.PRESENT)
    for norm in graph.norms:
        for criterion in norm.criteria:
            outcome = Outcome.FAIL if (norm.id, criterion.level) in FAILED_CRITERIA else Outcome.PASS
            session = record_answer(session, norm.id, criterion.level, outcome)
    return session


@pytest.fixture()
def elderly_session(elderly_graph):
    return build_elderly_session(elderly_graph)
