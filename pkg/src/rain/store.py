"""Plain-directory persistence with digests, revisions, and audit journals.

Layout (one directory per object id; everything inspectable with a pager):

    <root>/graphs/<id>/r000001.rain      one file per graph revision
    <root>/graphs/<id>/index.jsonl       {revision, digest, timestamp} per save
    <root>/graphs/<id>/journal.jsonl     audit events (policy merges, expansions)
    <root>/policies/<id>.rainpol         policy sources, for coverage re-checks
    <root>/projections/<id>.rainproj
    <root>/issues/<id>.rainissues
    <root>/sessions/<id>/meta.json       graph pin + head digest + revision
    <root>/sessions/<id>/journal.jsonl   append-only session events

Journal lines are digest-chained: each line's digest covers its content plus
the previous line's digest, so replay detects any rewrite.  Journals are
append-only; revision counters strictly increase per object.  Writers take
an advisory file lock per object id; readers never block.
"""

from __future__ import annotations

import fcntl
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from .canonical import digest_obj, digest_text
from .dsl.graph_text import parse_graph, serialize_graph
from .dsl.issues import IssueTemplateLibrary, parse_issue_templates
from .dsl.policy import PolicyDoc, parse_policy
from .dsl.projection import ProjectionRuleSet, parse_projection
from .errors import CorruptionError, NotFoundError, RevisionConflictError
from .model import RainGraph, is_slug
from .session import JournalEvent, Session, event_from_dict, utc_now_iso


@dataclass(frozen=True)
class Revision:
    number: int
    digest: str


@dataclass(frozen=True)
class ReplayResult:
    """A session rebuilt from its journal, with truncation made visible."""

    session: Session
    complete: bool
    expected_revision: int
    found_revision: int


def _check_id(object_id: str):
    if not is_slug(object_id):
        raise NotFoundError(f"object ids are lowercase slugs; got {object_id!r}", ids=(object_id,))


@contextmanager
def _locked(directory: Path):
    directory.mkdir(parents=True, exist_ok=True)
    lock_path = directory / ".lock"
    with open(lock_path, "w") as lock_file:
        fcntl.flock(lock_file, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(lock_file, fcntl.LOCK_UN)


def _append_jsonl(path: Path, record: dict):
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
        handle.flush()
        os.fsync(handle.fileno())


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        return []
    records = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _chain_digest(seq: int, timestamp: str, event: dict, prev: str | None) -> str:
    return digest_obj({"seq": seq, "timestamp": timestamp, "event": event, "prev": prev})


def append_chained(path: Path, events: list[dict], start_seq: int, prev: str | None) -> str | None:
    """Append digest-chained journal lines; returns the new head digest."""
    head = prev
    for offset, event in enumerate(events):
        seq = start_seq + offset
        timestamp = utc_now_iso()
        digest = _chain_digest(seq, timestamp, event, head)
        _append_jsonl(path, {"seq": seq, "timestamp": timestamp, "event": event, "prev": head, "digest": digest})
        head = digest
    return head


def read_chained(path: Path) -> list[dict]:
    """Read a chained journal, verifying every digest; returns the lines."""
    lines = _read_jsonl(path)
    prev: str | None = None
    for index, line in enumerate(lines):
        expected = _chain_digest(line.get("seq", index), line.get("timestamp", ""), line.get("event", {}), prev)
        if line.get("digest") != expected or line.get("prev") != prev or line.get("seq") != index:
            raise CorruptionError(f"journal {path} is corrupt at line {index + 1}")
        prev = line["digest"]
    return lines


class SessionFolder:
    """One session's files: meta.json plus a digest-chained journal."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.meta_path = self.path / "meta.json"
        self.journal_path = self.path / "journal.jsonl"

    def exists(self) -> bool:
        return self.meta_path.exists()

    def create(self, session_id: str, graph_meta: dict):
        with _locked(self.path):
            if self.meta_path.exists():
                raise RevisionConflictError(f"session {session_id} already exists", ids=(session_id,))
            self._write_meta({"session": session_id, "revision": 0, "head": None, **graph_meta})

    def meta(self) -> dict:
        if not self.meta_path.exists():
            raise NotFoundError(f"no session at {self.path}")
        return json.loads(self.meta_path.read_text(encoding="utf-8"))

    def _write_meta(self, meta: dict):
        self.meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    def append_events(self, events: list[JournalEvent], expected_revision: int) -> int:
        with _locked(self.path):
            meta = self.meta()
            lines = read_chained(self.journal_path)
            if len(lines) != expected_revision or meta["revision"] != expected_revision:
                raise RevisionConflictError(
                    f"session {meta['session']} is at revision {len(lines)}, expected {expected_revision}"
                )
            head = lines[-1]["digest"] if lines else None
            head = append_chained(self.journal_path, [e.to_dict() for e in events], len(lines), head)
            meta["revision"] = len(lines) + len(events)
            meta["head"] = head
            self._write_meta(meta)
            return meta["revision"]

    def read_events(self) -> tuple[list[JournalEvent], int, int]:
        """(events, expected revision, found revision); chain verified."""
        meta = self.meta()
        lines = read_chained(self.journal_path)
        events = [event_from_dict(line["event"]) for line in lines]
        return events, int(meta["revision"]), len(lines)


class Store:
    def __init__(self, root: Path | str):
        self.root = Path(root)

    # -- graphs -----------------------------------------------------------

    def _graph_dir(self, graph_id: str) -> Path:
        return self.root / "graphs" / graph_id

    def list_graphs(self) -> list[str]:
        base = self.root / "graphs"
        if not base.exists():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "index.jsonl").exists())

    def save_graph(self, graph_id: str, graph: RainGraph, event: dict | None = None) -> Revision:
        _check_id(graph_id)
        directory = self._graph_dir(graph_id)
        with _locked(directory):
            index = _read_jsonl(directory / "index.jsonl")
            number = (index[-1]["revision"] + 1) if index else 1
            text = serialize_graph(graph)
            digest = digest_text(text)
            (directory / f"r{number:06d}.rain").write_text(text, encoding="utf-8")
            _append_jsonl(
                directory / "index.jsonl",
                {"revision": number, "digest": digest, "timestamp": utc_now_iso()},
            )
            if event is not None:
                journal = directory / "journal.jsonl"
                lines = _read_jsonl(journal)
                prev = lines[-1]["digest"] if lines else None
                append_chained(journal, [{"revision": number, **event}], len(lines), prev)
            return Revision(number, digest)

    def graph_revisions(self, graph_id: str) -> list[Revision]:
        index = _read_jsonl(self._graph_dir(graph_id) / "index.jsonl")
        return [Revision(line["revision"], line["digest"]) for line in index]

    def load_graph(self, graph_id: str, revision: int | None = None) -> RainGraph:
        _check_id(graph_id)
        revisions = self.graph_revisions(graph_id)
        if not revisions:
            raise NotFoundError(f"unknown graph: {graph_id}", ids=(graph_id,))
        if revision is None:
            wanted = revisions[-1]
        else:
            matches = [r for r in revisions if r.number == revision]
            if not matches:
                raise NotFoundError(f"graph {graph_id} has no revision {revision}", ids=(graph_id,))
            wanted = matches[0]
        path = self._graph_dir(graph_id) / f"r{wanted.number:06d}.rain"
        if not path.exists():
            raise CorruptionError(f"graph revision file missing: {path}")
        text = path.read_text(encoding="utf-8")
        if digest_text(text) != wanted.digest:
            raise CorruptionError(
                f"graph {graph_id} revision {wanted.number} does not match its recorded digest"
            )
        graph = parse_graph(text)
        return graph.evolve(revision=wanted.number) if graph.revision != wanted.number else graph

    def graph_audit(self, graph_id: str) -> list[dict]:
        return read_chained(self._graph_dir(graph_id) / "journal.jsonl")

    # -- flat documents ----------------------------------------------------

    def _save_document(self, subdir: str, object_id: str, suffix: str, text: str):
        _check_id(object_id)
        directory = self.root / subdir
        with _locked(directory):
            (directory / f"{object_id}{suffix}").write_text(text, encoding="utf-8")
            _append_jsonl(
                directory / "index.jsonl",
                {"id": object_id, "digest": digest_text(text), "timestamp": utc_now_iso()},
            )

    def _load_document(self, subdir: str, object_id: str, suffix: str, description: str) -> str:
        _check_id(object_id)
        path = self.root / subdir / f"{object_id}{suffix}"
        if not path.exists():
            raise NotFoundError(f"unknown {description}: {object_id}", ids=(object_id,))
        text = path.read_text(encoding="utf-8")
        index = [line for line in _read_jsonl(self.root / subdir / "index.jsonl") if line["id"] == object_id]
        if index and index[-1]["digest"] != digest_text(text):
            raise CorruptionError(f"{description} {object_id} does not match its recorded digest")
        return text

    def _list_documents(self, subdir: str, suffix: str) -> list[str]:
        base = self.root / subdir
        if not base.exists():
            return []
        return sorted(p.name[: -len(suffix)] for p in base.iterdir() if p.name.endswith(suffix))

    def save_policy_source(self, policy_id: str, text: str):
        self._save_document("policies", policy_id, ".rainpol", text)

    def load_policy(self, policy_id: str) -> PolicyDoc:
        return parse_policy(self._load_document("policies", policy_id, ".rainpol", "policy"))

    def list_policies(self) -> list[str]:
        return self._list_documents("policies", ".rainpol")

    def save_projection(self, projection_id: str, text: str):
        parse_projection(text)  # reject malformed documents before storing
        self._save_document("projections", projection_id, ".rainproj", text)

    def load_projection(self, projection_id: str) -> ProjectionRuleSet:
        return parse_projection(self._load_document("projections", projection_id, ".rainproj", "projection"))

    def list_projections(self) -> list[str]:
        return self._list_documents("projections", ".rainproj")

    def save_issue_library(self, library_id: str, text: str):
        parse_issue_templates(text)
        self._save_document("issues", library_id, ".rainissues", text)

    def load_issue_library(self, library_id: str) -> IssueTemplateLibrary:
        return parse_issue_templates(self._load_document("issues", library_id, ".rainissues", "issue library"))

    def list_issue_libraries(self) -> list[str]:
        return self._list_documents("issues", ".rainissues")

    # -- sessions ----------------------------------------------------------

    def _session_folder(self, session_id: str) -> SessionFolder:
        _check_id(session_id)
        return SessionFolder(self.root / "sessions" / session_id)

    def list_sessions(self) -> list[str]:
        base = self.root / "sessions"
        if not base.exists():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "meta.json").exists())

    def create_session(self, session_id: str, graph_id: str) -> Session:
        revisions = self.graph_revisions(graph_id)
        if not revisions:
            raise NotFoundError(f"unknown graph: {graph_id}", ids=(graph_id,))
        head = revisions[-1]
        folder = self._session_folder(session_id)
        folder.create(
            session_id,
            {"graph": graph_id, "graph_revision": head.number, "graph_digest": head.digest},
        )
        graph = self.load_graph(graph_id, head.number)
        return Session(id=session_id, graph=graph)

    def session_meta(self, session_id: str) -> dict:
        return self._session_folder(session_id).meta()

    def load_session(self, session_id: str) -> Session:
        result = self.replay(session_id)
        if not result.complete:
            raise CorruptionError(
                f"session {session_id} journal is truncated "
                f"(expected revision {result.expected_revision}, found {result.found_revision})"
            )
        return result.session

    def replay(self, session_id: str) -> ReplayResult:
        """Rebuild the session from its journal; truncation is flagged, not fatal."""
        folder = self._session_folder(session_id)
        meta = folder.meta()
        graph = self.load_graph(meta["graph"], meta["graph_revision"])
        events, expected, found = folder.read_events()
        session = Session(id=session_id, graph=graph, journal=tuple(events))
        return ReplayResult(
            session=session,
            complete=found >= expected,
            expected_revision=expected,
            found_revision=found,
        )

    def append_session_events(self, session_id: str, events: list[JournalEvent], expected_revision: int) -> int:
        return self._session_folder(session_id).append_events(events, expected_revision)
