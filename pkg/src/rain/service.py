"""HTTP API over the store: graph management and assessment sessions.

Every route is a thin shell around the corresponding library operation; all
responses are deterministic functions of store state.  Writes carry an
``X-Expected-Revision`` header (optimistic concurrency): a stale value gets
409, a missing one 400.  Report-shaped responses are emitted as canonical
JSON bytes so that an HTTP-driven assessment is byte-identical to a
library-driven one.

Error mapping: 400 malformed input, 404 unknown object, 409 revision
conflict, 422 engine precondition, 500 store corruption.
"""

from __future__ import annotations

import uuid
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .algorithms import BatchAnswerSource, TemplateIssueSource, covers_policy, decompose, expand
from .canonical import canonical_json
from .dsl import issue_from_dict, parse_graph, parse_issue_templates, parse_policy, serialize_graph
from .dsl.graph_text import graph_digest
from .dsl.reader import ParseFailure
from .errors import (
    AmbiguousAliasError,
    BindingError,
    CorruptionError,
    IntegrityError,
    NotFoundError,
    PreconditionError,
    RainError,
    RevisionConflictError,
    ScaleMismatchError,
    UnknownEntityError,
)
from .model import Feature, Stakeholder, Value, is_slug
from .results import report_bundle, what_if
from .session import (
    Outcome,
    Presence,
    Session,
    active_norms,
    activated_values,
    assert_context,
    assessment_items,
    next_questions,
    record_answer,
)
from .store import Store

EXPECTED_REVISION_HEADER = "X-Expected-Revision"

_STATUS_BY_ERROR = (
    (ParseFailure, 400),
    (RevisionConflictError, 409),
    (NotFoundError, 404),
    (UnknownEntityError, 404),
    (CorruptionError, 500),
    (AmbiguousAliasError, 422),
    (IntegrityError, 422),
    (ScaleMismatchError, 422),
    (PreconditionError, 422),
    (BindingError, 422),
)


class ValidationFailure(RainError):
    code = "validation"


class SessionCreate(BaseModel):
    graph: str
    session: str | None = None


class ContextPost(BaseModel):
    assertions: dict[str, str]


class AnswerItem(BaseModel):
    norm: str
    level: int
    outcome: str
    evidence: str | None = None


class AnswersPost(BaseModel):
    answers: list[AnswerItem]


class WhatIfPost(BaseModel):
    overrides: dict[str, str]
    projections: list[str] = []


class FeatureDecl(BaseModel):
    id: str
    label: str | None = None
    question: str
    aliases: list[str] = []


class BatchAnswer(BaseModel):
    feature: str
    value: str
    stakeholder: str
    issues: list[dict] = []


class EntityDecls(BaseModel):
    values: list[dict] = []
    stakeholders: list[dict] = []
    features: list[dict] = []


class ExpandPost(BaseModel):
    features: list[FeatureDecl] = []
    templates: str | None = None
    answers: list[BatchAnswer] | None = None
    declarations: EntityDecls | None = None
    source: str = "api-batch"


def _canonical_response(payload: dict, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), media_type="application/json", status_code=status_code)


def _expected_revision(request: Request) -> int:
    raw = request.headers.get(EXPECTED_REVISION_HEADER)
    if raw is None:
        raise ValidationFailure(f"writes require the {EXPECTED_REVISION_HEADER} header")
    try:
        return int(raw)
    except ValueError:
        raise ValidationFailure(f"{EXPECTED_REVISION_HEADER} must be an integer, got {raw!r}")


def _require_slug(object_id: str, description: str) -> str:
    if not is_slug(object_id):
        raise ValidationFailure(f"{description} must be a lowercase slug, got {object_id!r}")
    return object_id


def _presence(value: str) -> Presence:
    try:
        return Presence(value)
    except ValueError:
        raise ValidationFailure(f"presence must be one of present, absent, unknown; got {value!r}")


def _outcome(value: str) -> Outcome:
    try:
        return Outcome(value)
    except ValueError:
        raise ValidationFailure(f"outcome must be pass or fail; got {value!r}")


def _entity_decls(decls: EntityDecls | None) -> dict[str, dict]:
    declarations: dict[str, dict] = {"values": {}, "stakeholders": {}, "features": {}}
    if decls is None:
        return declarations
    for data in decls.values:
        value = Value(
            id=data["id"],
            label=data.get("label", data["id"]),
            aliases=frozenset(data.get("aliases", [])),
            origin=data.get("origin", "expansion:api"),
        )
        declarations["values"][value.id] = value
    for data in decls.stakeholders:
        stakeholder = Stakeholder(
            id=data["id"],
            label=data.get("label", data["id"]),
            question=data.get("question", ""),
            aliases=frozenset(data.get("aliases", [])),
        )
        declarations["stakeholders"][stakeholder.id] = stakeholder
    for data in decls.features:
        feature = Feature(
            id=data["id"],
            label=data.get("label", data["id"]),
            question=data.get("question", ""),
            aliases=frozenset(data.get("aliases", [])),
        )
        declarations["features"][feature.id] = feature
    return declarations


def create_app(store: Store, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="rain", version="0.1.0", docs_url=None, redoc_url=None)

    @app.exception_handler(RainError)
    async def rain_error_handler(_request: Request, exc: RainError):
        status = 400 if isinstance(exc, ValidationFailure) else 422
        for error_type, code in _STATUS_BY_ERROR:
            if isinstance(exc, error_type):
                status = code
                break
        body = {"code": exc.code, "message": str(exc), "ids": list(exc.ids)}
        if isinstance(exc, ParseFailure):
            body["errors"] = [e.to_dict() for e in exc.errors]
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(RequestValidationError)
    async def body_validation_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"code": "validation", "message": str(exc.errors()[:3]), "ids": []},
        )

    # -- graphs ---------------------------------------------------------

    @app.post("/graphs", status_code=201)
    async def create_graph(request: Request, id: str | None = Query(default=None)):
        text = (await request.body()).decode("utf-8")
        graph = parse_graph(text)
        digest = graph_digest(graph)
        graph_id = _require_slug(id, "graph id") if id else f"g-{digest[:10]}"
        revision = store.save_graph(graph_id, graph, event={"kind": "graph-created"})
        return {"graph": graph_id, "revision": revision.number, "digest": revision.digest}

    @app.get("/graphs")
    async def list_graphs():
        return {"graphs": store.list_graphs()}

    @app.get("/graphs/{graph_id}")
    async def get_graph(graph_id: str, revision: int | None = Query(default=None)):
        graph = store.load_graph(graph_id, revision)
        return Response(
            content=serialize_graph(graph),
            media_type="text/plain; charset=utf-8",
            headers={"X-Revision": str(graph.revision)},
        )

    @app.post("/graphs/{graph_id}/policies")
    async def merge_policy(graph_id: str, request: Request):
        expected = _expected_revision(request)
        text = (await request.body()).decode("utf-8")
        policy = parse_policy(text)
        graph = store.load_graph(graph_id)
        if graph.revision != expected:
            raise RevisionConflictError(f"graph {graph_id} is at revision {graph.revision}, expected {expected}")
        merged, delta = decompose(graph, policy)
        store.save_policy_source(policy.id, text)
        if delta.empty:
            return {
                "policy": policy.id,
                "revision": graph.revision,
                "digest": graph_digest(graph),
                "delta": delta.to_dict(),
            }
        revision = store.save_graph(
            graph_id,
            merged,
            event={"kind": "policy-merged", "policy": policy.id, "delta": delta.to_dict()},
        )
        return {
            "policy": policy.id,
            "revision": revision.number,
            "digest": revision.digest,
            "delta": delta.to_dict(),
        }

    @app.post("/graphs/{graph_id}/expand")
    async def expand_graph(graph_id: str, body: ExpandPost, request: Request):
        expected = _expected_revision(request)
        graph = store.load_graph(graph_id)
        if graph.revision != expected:
            raise RevisionConflictError(f"graph {graph_id} is at revision {graph.revision}, expected {expected}")
        features = [
            Feature(
                id=_require_slug(f.id, "feature id"),
                label=f.label or f.id,
                question=f.question,
                aliases=frozenset(f.aliases),
                staged=True,
            )
            for f in body.features
        ]
        if body.answers is not None:
            answers = {
                (a.feature, a.value, a.stakeholder): [issue_from_dict(i) for i in a.issues]
                for a in body.answers
            }
            source = BatchAnswerSource(answers, _entity_decls(body.declarations), name=body.source)
        elif body.templates is not None:
            source = TemplateIssueSource(parse_issue_templates(body.templates))
        else:
            raise ValidationFailure("expansion needs either 'templates' text or batch 'answers'")
        expanded, report = expand(graph, features, source)
        if report.completed and not report.empty:
            revision = store.save_graph(
                graph_id,
                expanded,
                event={
                    "kind": "expanded",
                    "source": getattr(source, "name", "source"),
                    "answers": [a.to_dict() for a in report.answers],
                    "report": report.to_dict(),
                },
            )
            return {"revision": revision.number, "digest": revision.digest, "report": report.to_dict()}
        return {"revision": graph.revision, "digest": graph_digest(graph), "report": report.to_dict()}

    @app.get("/graphs/{graph_id}/coverage")
    async def graph_coverage(graph_id: str, policy: str):
        graph = store.load_graph(graph_id)
        policy_doc = store.load_policy(policy)
        covered, delta = covers_policy(graph, policy_doc)
        return {"covered": covered, "policy": policy, "delta": delta.to_dict()}

    # -- projections ------------------------------------------------------

    @app.post("/projections", status_code=201)
    async def upload_projection(request: Request, id: str | None = Query(default=None)):
        text = (await request.body()).decode("utf-8")
        from .dsl import parse_projection

        ruleset = parse_projection(text)
        projection_id = _require_slug(id, "projection id") if id else ruleset.id
        store.save_projection(projection_id, text)
        return {"projection": projection_id, "rules": len(ruleset.rules)}

    @app.get("/projections")
    async def list_projections():
        return {"projections": store.list_projections()}

    # -- sessions ---------------------------------------------------------

    def _load_session(session_id: str) -> Session:
        return store.load_session(session_id)

    @app.post("/sessions", status_code=201)
    async def create_session(body: SessionCreate):
        session_id = _require_slug(body.session, "session id") if body.session else f"s-{uuid.uuid4().hex[:10]}"
        session = store.create_session(session_id, _require_slug(body.graph, "graph id"))
        return {
            "session": session_id,
            "graph": body.graph,
            "graph_revision": session.graph.revision,
            "revision": session.revision,
        }

    @app.get("/sessions/{session_id}")
    async def session_info(session_id: str):
        meta = store.session_meta(session_id)
        return {
            "session": session_id,
            "graph": meta["graph"],
            "graph_revision": meta["graph_revision"],
            "revision": meta["revision"],
        }

    @app.get("/sessions/{session_id}/questions")
    async def session_questions(session_id: str):
        session = _load_session(session_id)
        return _canonical_response(
            {"revision": session.revision, "questions": [q.to_dict() for q in next_questions(session)]}
        )

    @app.post("/sessions/{session_id}/context")
    async def post_context(session_id: str, body: ContextPost, request: Request):
        expected = _expected_revision(request)
        session = _load_session(session_id)
        if session.revision != expected:
            raise RevisionConflictError(
                f"session {session_id} is at revision {session.revision}, expected {expected}"
            )
        updated = session
        for entity_id in sorted(body.assertions):
            updated = assert_context(updated, entity_id, _presence(body.assertions[entity_id]))
        new_events = list(updated.journal[session.revision:])
        revision = store.append_session_events(session_id, new_events, expected)
        return {"revision": revision}

    @app.get("/sessions/{session_id}/norms")
    async def session_norms(session_id: str):
        session = _load_session(session_id)
        statuses = active_norms(session)
        return _canonical_response(
            {
                "revision": session.revision,
                "norms": {norm_id: status.to_dict() for norm_id, status in sorted(statuses.items())},
                "activated_values": sorted(activated_values(session)),
            }
        )

    @app.get("/sessions/{session_id}/items")
    async def session_items(session_id: str, kind: str | None = Query(default=None)):
        session = _load_session(session_id)
        if kind is not None and kind not in ("quiz", "evidence", "monitor"):
            raise ValidationFailure(f"kind must be quiz, evidence, or monitor; got {kind!r}")
        items = assessment_items(session, kind)
        return _canonical_response({"revision": session.revision, "items": [i.to_dict() for i in items]})

    @app.post("/sessions/{session_id}/answers")
    async def post_answers(session_id: str, body: AnswersPost, request: Request):
        expected = _expected_revision(request)
        session = _load_session(session_id)
        if session.revision != expected:
            raise RevisionConflictError(
                f"session {session_id} is at revision {session.revision}, expected {expected}"
            )
        updated = session
        for answer in body.answers:
            updated = record_answer(
                updated, answer.norm, answer.level, _outcome(answer.outcome), answer.evidence
            )
        new_events = list(updated.journal[session.revision:])
        revision = store.append_session_events(session_id, new_events, expected)
        return {"revision": revision}

    def _rulesets(names: list[str]):
        return tuple(store.load_projection(name) for name in names)

    @app.get("/sessions/{session_id}/report")
    async def session_report(session_id: str, projection: list[str] = Query(default=[])):
        session = _load_session(session_id)
        return _canonical_response(report_bundle(session, _rulesets(projection)))

    @app.post("/sessions/{session_id}/whatif")
    async def session_whatif(session_id: str, body: WhatIfPost):
        session = _load_session(session_id)
        overrides = {entity: _presence(p) for entity, p in body.overrides.items()}
        rulesets = _rulesets(body.projections)
        return _canonical_response(
            {
                "baseline": report_bundle(session, rulesets),
                "hypothetical": what_if(session, overrides, rulesets),
                "revision": session.revision,
            }
        )

    @app.get("/sessions/{session_id}/projection/{projection_id}")
    async def session_projection(session_id: str, projection_id: str):
        session = _load_session(session_id)
        ruleset = store.load_projection(projection_id)
        from .results import project

        return _canonical_response(
            {
                "ruleset": ruleset.id,
                "external": ruleset.external,
                "items": project(session, ruleset),
            }
        )

    if ui_dir is not None and Path(ui_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
