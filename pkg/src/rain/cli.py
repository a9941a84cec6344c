"""Operator commands for the full lifecycle without the UI.

Exit codes: 0 success (or covered), 1 validation/coverage/engine failure,
2 usage error.  All output ordering is deterministic so golden-file tests
stay byte-stable.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .algorithms import TemplateIssueSource, covers_policy, decompose, expand
from .canonical import digest_text
from .dsl import (
    parse_graph,
    parse_issue_templates,
    parse_policy,
    parse_projection,
    serialize_graph,
)
from .dsl.reader import ParseFailure
from .errors import RainError
from .model import MaturityScale, RainGraph, make_graph
from .results import aggregate_by, is_ethical_compliant, project, report_bundle
from .session import (
    Activation,
    Outcome,
    Presence,
    Session,
    active_norms,
    assert_context,
    assessment_items,
    next_questions,
    record_answer,
)
from .store import SessionFolder

_PARSERS = {
    ".rainpol": ("policy", parse_policy),
    ".rain": ("graph", parse_graph),
    ".rainproj": ("projection", parse_projection),
    ".rainissues": ("issue-template library", parse_issue_templates),
}


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_file(path: Path):
    kind = _PARSERS.get(path.suffix)
    if kind is None:
        _fail(f"unrecognized extension {path.suffix!r} (expected one of {', '.join(sorted(_PARSERS))})")
    label, parser = kind
    try:
        return label, parser(path.read_text(encoding="utf-8"))
    except ParseFailure as failure:
        for error in failure.errors:
            click.echo(f"{path}:{error}", err=True)
        sys.exit(1)
    except RainError as error:
        _fail(str(error))


def _load_graph_file(path: Path) -> RainGraph:
    label, parsed = _parse_file(path)
    if label != "graph":
        _fail(f"{path} is a {label}, expected a graph")
    return parsed


@click.group()
@click.version_option(package_name="rain")
def main():
    """Compliance engine for contextualized norms."""


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate(path: Path):
    """Parse and validate a policy, graph, projection, or issue library."""
    label, parsed = _parse_file(path)
    identity = getattr(parsed, "id", None)
    click.echo(f"ok: {label}" + (f" {identity}" if identity else ""))


@main.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Existing graph to merge into; omit to start from an empty graph.")
@click.option("--policy", "policy_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
def merge(graph_path: Path | None, policy_path: Path, out_path: Path):
    """Decompose a policy into a graph and write the canonical result."""
    label, policy = _parse_file(policy_path)
    if label != "policy":
        _fail(f"{policy_path} is a {label}, expected a policy")
    if graph_path is not None:
        graph = _load_graph_file(graph_path)
    else:
        graph = make_graph(scale=MaturityScale.of(policy.scale) if policy.scale else None)
    try:
        merged, delta = decompose(graph, policy)
    except RainError as error:
        _fail(str(error))
    out_path.write_text(serialize_graph(merged), encoding="utf-8")
    click.echo(delta.summary())


@main.command(name="expand")
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--features", "features_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Graph document whose feature declarations are staged for review.")
@click.option("--issues", "issues_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--interactive", is_flag=True, help="Confirm each template-proposed issue per intersection.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
def expand_cmd(graph_path: Path, features_path: Path | None, issues_path: Path, interactive: bool, out_path: Path):
    """Review unjudged intersections against an issue-template library."""
    graph = _load_graph_file(graph_path)
    label, library = _parse_file(issues_path)
    if label != "issue-template library":
        _fail(f"{issues_path} is a {label}, expected an issue-template library")
    new_features = ()
    if features_path is not None:
        new_features = _load_graph_file(features_path).features
    source = TemplateIssueSource(library)
    if interactive:
        source = _InteractiveSource(source)
    try:
        expanded, report = expand(graph, new_features, source)
    except RainError as error:
        _fail(str(error))
    if not report.completed:
        click.echo(f"aborted: {len(report.pending)} intersections left unanswered", err=True)
        sys.exit(1)
    out_path.write_text(serialize_graph(expanded), encoding="utf-8")
    click.echo(
        f"reviewed {report.queried} intersections; "
        f"added {len(report.norms_added)} norms; "
        f"pruned {len(report.features_pruned)} features"
    )


class _InteractiveSource:
    """Confirmation layer over a template source: accept or drop each proposal."""

    def __init__(self, inner: TemplateIssueSource):
        self.inner = inner
        self.name = inner.name

    def issues_for(self, feature_id, value_id, stakeholder_id):
        proposed = self.inner.issues_for(feature_id, value_id, stakeholder_id)
        kept = []
        for issue in proposed:
            if click.confirm(
                f"({feature_id} / {value_id} / {stakeholder_id}) apply issue {issue.id!r}?", default=True
            ):
                kept.append(issue)
        return kept

    def declared(self, kind, entity_id):
        return self.inner.declared(kind, entity_id)


@main.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
@click.option("--policy", "policy_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), required=True)
def cover(graph_path: Path, policy_path: Path):
    """Exit 0 iff the graph covers the policy (re-merging changes nothing)."""
    graph = _load_graph_file(graph_path)
    label, policy = _parse_file(policy_path)
    if label != "policy":
        _fail(f"{policy_path} is a {label}, expected a policy")
    try:
        covered, delta = covers_policy(graph, policy)
    except RainError as error:
        _fail(str(error))
    if covered:
        click.echo(f"covered: {policy.id}")
        sys.exit(0)
    click.echo(f"not covered: {delta.summary()}")
    sys.exit(1)


def _open_session_dir(session_dir: Path, graph_path: Path | None) -> tuple[SessionFolder, Session]:
    folder = SessionFolder(session_dir)
    graph_file = session_dir / "graph.rain"
    if folder.exists():
        meta = folder.meta()
        text = graph_file.read_text(encoding="utf-8")
        if digest_text(text) != meta["graph_digest"]:
            _fail(f"graph copy in {session_dir} does not match the session's pinned digest")
        graph = parse_graph(text)
        if graph_path is not None:
            supplied = serialize_graph(_load_graph_file(graph_path))
            if digest_text(supplied) != meta["graph_digest"]:
                _fail("--graph differs from the graph this session was created with")
        events, expected, found = folder.read_events()
        if found < expected:
            _fail(f"session journal is truncated (expected revision {expected}, found {found})")
        return folder, Session(id=meta["session"], graph=graph, journal=tuple(events))
    if graph_path is None:
        _fail(f"no session at {session_dir}; pass --graph to create one")
    graph = _load_graph_file(graph_path)
    text = serialize_graph(graph)
    session_dir.mkdir(parents=True, exist_ok=True)
    graph_file.write_text(text, encoding="utf-8")
    session_id = session_dir.name if session_dir.name else "session"
    folder.create(session_id, {"graph_digest": digest_text(text)})
    return folder, Session(id=session_id, graph=graph)


def _ask(prompt_text: str) -> str | None:
    """y/n/s prompt; returns 'y', 'n', or None for skip."""
    while True:
        answer = click.prompt(f"{prompt_text} [y/n/s]", default="s", show_default=False).strip().lower()
        if answer in ("y", "yes"):
            return "y"
        if answer in ("n", "no"):
            return "n"
        if answer in ("s", "skip", ""):
            return None
        click.echo("please answer y, n, or s")


@main.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--session", "session_dir", type=click.Path(file_okay=False, path_type=Path), required=True)
def assess(graph_path: Path | None, session_dir: Path):
    """Terminal questionnaire: context questions, then assessment items."""
    folder, session = _open_session_dir(session_dir, graph_path)

    click.echo("== context questions ==")
    while True:
        questions = next_questions(session)
        if not questions:
            break
        progressed = False
        for question in questions:
            answer = _ask(f"[{question.entity_kind} {question.entity_id}] {question.question}")
            if answer is None:
                continue
            presence = Presence.PRESENT if answer == "y" else Presence.ABSENT
            updated = assert_context(session, question.entity_id, presence)
            folder.append_events(list(updated.journal[session.revision:]), session.revision)
            session = updated
            progressed = True
            break  # re-rank: the answer may have changed what matters most
        if not progressed:
            click.echo("(remaining questions skipped)")
            break

    click.echo("== assessment items ==")
    while True:
        items = assessment_items(session)
        if not items:
            break
        progressed = False
        for item in items:
            criterion = item.criterion
            answer = _ask(f"[{item.norm_id} L{criterion.level} {criterion.kind.value}] {criterion.prompt}")
            if answer is None:
                continue
            yes = answer == "y"
            if criterion.fail_on.value == "yes":
                outcome = Outcome.FAIL if yes else Outcome.PASS
            else:  # fail-on no and fail-on absent: a "no" fails
                outcome = Outcome.PASS if yes else Outcome.FAIL
            updated = record_answer(session, item.norm_id, criterion.level, outcome)
            folder.append_events(list(updated.journal[session.revision:]), session.revision)
            session = updated
            progressed = True
        if not progressed:
            click.echo("(remaining items skipped)")
            break

    click.echo("== summary ==")
    _print_report(session, dimension="value")


def _format_level(value) -> str:
    return str(value)


def _print_report(session: Session, dimension: str):
    compliant = is_ethical_compliant(session)
    click.echo(f"compliant: {str(compliant).lower() if isinstance(compliant, bool) else compliant}")
    statuses = active_norms(session)
    active = sum(1 for s in statuses.values() if s.state is Activation.ACTIVE)
    click.echo(f"norms: {active} active of {len(statuses)}")
    click.echo(f"by {dimension}:")
    for report in aggregate_by(session, dimension):
        click.echo(
            f"  {report.group_id:<28} worst={_format_level(report.worst_violation):<10} "
            f"maturity={_format_level(report.maturity)}"
        )


@main.command(name="report")
@click.option("--session", "session_dir", type=click.Path(exists=True, file_okay=False, path_type=Path), required=True)
@click.option("--projection", "projection_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--by", "dimension", type=click.Choice(["value", "stakeholder", "feature", "policy"]), default="value")
def report_cmd(session_dir: Path, projection_path: Path | None, dimension: str):
    """Aggregated results for a session, optionally projected onto an external policy."""
    _, session = _open_session_dir(session_dir, None)
    _print_report(session, dimension)
    if projection_path is not None:
        label, ruleset = _parse_file(projection_path)
        if label != "projection":
            _fail(f"{projection_path} is a {label}, expected a projection")
        try:
            results = project(session, ruleset)
        except RainError as error:
            _fail(str(error))
        click.echo(f"projection {ruleset.id} ({ruleset.external}):")
        for item in results:
            click.echo(f"  {item['item']:<28} {item['result']}")


@main.command()
@click.option("--store-dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--ui-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Static UI bundle to serve at /; defaults to a frontend/dist next to the store.")
def serve(store_dir: Path, port: int, host: str, ui_dir: Path | None):
    """Run the HTTP API (and the assessor UI when a bundle is available)."""
    import uvicorn

    from .service import create_app
    from .store import Store

    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        ui_dir = candidate if candidate.exists() else None
    app = create_app(Store(store_dir), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
