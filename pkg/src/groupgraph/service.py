"""Study service: timed participant sessions over HTTP with durable records.

State lives in an append-only JSONL event log per study (plus the bundle
document written once at registration).  Restarting the service replays the
logs, so exported results are identical across restarts.  Answer keys never
leave the server; participants receive derived views only.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import tasks
from .bundle import instance_for_scoring, participant_bundle, validate_bundle
from .errors import AnswerKindError, BundleError, ConflictError, UnknownIdError
from .model import canonical_json


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


def _iso(ms: int) -> str:
    stamp = datetime.fromtimestamp(ms / 1000.0, tz=timezone.utc)
    return stamp.isoformat(timespec="milliseconds").replace("+00:00", "Z")


@dataclass
class SessionState:
    session_id: str
    study_id: str
    participant_id: str
    started_at: int
    cursor: int = 0
    finished_at: int | None = None
    delivered_at: int | None = None  # delivery mark of the outstanding instance


@dataclass
class StudyState:
    study_id: str
    bundle: dict[str, Any]
    records: list[dict[str, Any]] = field(default_factory=list)
    session_order: list[str] = field(default_factory=list)


class StudyService:
    """In-process API behind the HTTP layer; all operations are lock-serialized."""

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._studies: dict[str, StudyState] = {}
        self._sessions: dict[str, SessionState] = {}
        self._replay()

    # -- persistence -----------------------------------------------------

    def _study_dir(self, study_id: str) -> Path:
        return self.root / study_id

    def _events_path(self, study_id: str) -> Path:
        return self._study_dir(study_id) / "events.jsonl"

    def _append_event(self, study_id: str, event: dict[str, Any]) -> None:
        line = canonical_json(event) + "\n"
        with open(self._events_path(study_id), "a", encoding="utf-8") as handle:
            handle.write(line)
            handle.flush()

    def _replay(self) -> None:
        for bundle_path in sorted(self.root.glob("*/bundle.json")):
            bundle = json.loads(bundle_path.read_text(encoding="utf-8"))
            study_id = bundle["study_id"]
            state = StudyState(study_id=study_id, bundle=bundle)
            self._studies[study_id] = state
            events_path = self._events_path(study_id)
            if not events_path.exists():
                continue
            with open(events_path, encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    event = json.loads(line)
                    if event["event"] == "session":
                        session = SessionState(
                            session_id=event["session_id"],
                            study_id=study_id,
                            participant_id=event["participant_id"],
                            started_at=event["started_at"],
                        )
                        self._sessions[session.session_id] = session
                        state.session_order.append(session.session_id)
                    elif event["event"] == "response":
                        record = dict(event)
                        record.pop("event")
                        state.records.append(record)
                        session = self._sessions[record["session_id"]]
                        session.cursor += 1
                        session.delivered_at = None
                        if session.cursor >= len(state.bundle["instances"]):
                            session.finished_at = record["received_at"]

    # -- operations --------------------------------------------------------

    def create_study(self, bundle: dict[str, Any]) -> str:
        with self._lock:
            validate_bundle(bundle)
            study_id = bundle["study_id"]
            if study_id in self._studies or self._study_dir(study_id).exists():
                raise ConflictError(f"study {study_id!r} already exists")
            self._study_dir(study_id).mkdir(parents=True)
            (self._study_dir(study_id) / "bundle.json").write_text(
                canonical_json(bundle), encoding="utf-8"
            )
            self._studies[study_id] = StudyState(study_id=study_id, bundle=bundle)
            return study_id

    def create_session(self, study_id: str, participant_id: str = "anonymous") -> dict[str, Any]:
        with self._lock:
            study = self._require_study(study_id)
            session = SessionState(
                session_id=uuid.uuid4().hex,
                study_id=study_id,
                participant_id=participant_id or "anonymous",
                started_at=_now_ms(),
            )
            self._sessions[session.session_id] = session
            study.session_order.append(session.session_id)
            self._append_event(
                study_id,
                {
                    "event": "session",
                    "session_id": session.session_id,
                    "participant_id": session.participant_id,
                    "started_at": session.started_at,
                },
            )
            view = participant_bundle(study.bundle)
            return {
                "session_id": session.session_id,
                "study_id": study_id,
                "participant_id": session.participant_id,
                "task_count": len(study.bundle["instances"]),
                "reveal_correctness": bool(study.bundle.get("reveal_correctness", False)),
                "stimulus": {"graph": view["graph"], "layout": view["layout"]},
            }

    def next_task(self, session_id: str) -> dict[str, Any]:
        """The outstanding instance (idempotent) or done; marks first delivery time."""
        with self._lock:
            session = self._require_session(session_id)
            study = self._studies[session.study_id]
            instances = study.bundle["instances"]
            if session.cursor >= len(instances):
                return {"done": True, "cursor": session.cursor, "of": len(instances)}
            if session.delivered_at is None:
                session.delivered_at = _now_ms()
            entry = instances[session.cursor]
            return {
                "done": False,
                "cursor": session.cursor,
                "of": len(instances),
                "instance": entry,
            }

    def submit_answer(self, session_id: str, instance_id: str, answer: Any) -> dict[str, Any]:
        with self._lock:
            session = self._require_session(session_id)
            study = self._studies[session.study_id]
            instances = study.bundle["instances"]
            if session.cursor >= len(instances):
                raise ConflictError("session already finished")
            expected = instances[session.cursor]["instance_id"]
            if instance_id != expected:
                raise ConflictError(
                    f"out-of-order answer: expected {expected!r}, got {instance_id!r}"
                )
            instance = instance_for_scoring(study.bundle, instance_id)
            result = tasks.score(instance, answer)  # AnswerKindError leaves cursor unchanged
            received_at = _now_ms()
            delivered_at = session.delivered_at if session.delivered_at is not None else received_at
            record = {
                "session_id": session_id,
                "participant_id": session.participant_id,
                "instance_id": instance_id,
                "template_id": instance.template_id,
                "cursor": session.cursor,
                "answer": answer,
                "received_at": received_at,
                "received_at_iso": _iso(received_at),
                "delivered_at": delivered_at,
                "latency_ms": max(0, received_at - delivered_at),
                "correct": result.correct,
            }
            self._append_event(session.study_id, {"event": "response", **record})
            study.records.append(record)
            session.cursor += 1
            session.delivered_at = None
            if session.cursor >= len(instances):
                session.finished_at = received_at
            response: dict[str, Any] = {
                "accepted": True,
                "cursor": session.cursor,
                "done": session.cursor >= len(instances),
            }
            if study.bundle.get("reveal_correctness", False):
                response["correct"] = result.correct
            return response

    def export_results(self, study_id: str) -> dict[str, Any]:
        """All records in (session creation, cursor) order, plus per-template aggregates."""
        with self._lock:
            study = self._require_study(study_id)
            order = {sid: index for index, sid in enumerate(study.session_order)}
            records = sorted(
                study.records,
                key=lambda record: (order.get(record["session_id"], 1 << 30), record["cursor"]),
            )
            by_template: dict[str, list[dict[str, Any]]] = {}
            for record in records:
                by_template.setdefault(record["template_id"], []).append(record)
            aggregates = {}
            for template_id in sorted(by_template):
                bucket = by_template[template_id]
                latencies = sorted(record["latency_ms"] for record in bucket)
                mid = len(latencies) // 2
                median = (
                    latencies[mid]
                    if len(latencies) % 2 == 1
                    else (latencies[mid - 1] + latencies[mid]) / 2
                )
                aggregates[template_id] = {
                    "count": len(bucket),
                    "accuracy": sum(1 for r in bucket if r["correct"]) / len(bucket),
                    "median_latency_ms": median,
                }
            return {"study_id": study_id, "records": records, "aggregates": aggregates}

    # -- helpers ------------------------------------------------------------

    def _require_study(self, study_id: str) -> StudyState:
        if study_id not in self._studies:
            raise UnknownIdError(f"unknown study {study_id!r}")
        return self._studies[study_id]

    def _require_session(self, session_id: str) -> SessionState:
        if session_id not in self._sessions:
            raise UnknownIdError(f"unknown session {session_id!r}")
        return self._sessions[session_id]


def create_app(service: StudyService) -> FastAPI:
    """FastAPI wrapper exposing the wire protocol."""
    app = FastAPI(title="groupgraph study service")

    def _fail(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.exception_handler(UnknownIdError)
    async def _unknown(request: Request, exc: UnknownIdError) -> JSONResponse:
        return _fail(404, str(exc))

    @app.exception_handler(ConflictError)
    async def _conflict(request: Request, exc: ConflictError) -> JSONResponse:
        return _fail(409, str(exc))

    @app.exception_handler(BundleError)
    async def _bundle(request: Request, exc: BundleError) -> JSONResponse:
        return _fail(400, str(exc))

    @app.exception_handler(AnswerKindError)
    async def _answer(request: Request, exc: AnswerKindError) -> JSONResponse:
        return _fail(400, str(exc))

    async def _json_body(request: Request) -> dict[str, Any]:
        try:
            body = await request.json()
        except Exception:
            raise BundleError("request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise BundleError("request body must be a JSON object")
        return body

    @app.post("/studies")
    async def post_study(request: Request) -> dict[str, Any]:
        bundle = await _json_body(request)
        return {"study_id": service.create_study(bundle)}

    @app.post("/studies/{study_id}/sessions")
    async def post_session(study_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request) if int(request.headers.get("content-length") or 0) else {}
        return service.create_session(study_id, body.get("participant_id", "anonymous"))

    @app.get("/sessions/{session_id}/next")
    async def get_next(session_id: str) -> dict[str, Any]:
        return service.next_task(session_id)

    @app.post("/sessions/{session_id}/answer")
    async def post_answer(session_id: str, request: Request) -> dict[str, Any]:
        body = await _json_body(request)
        if "instance_id" not in body or "answer" not in body:
            raise BundleError("answer body needs 'instance_id' and 'answer'")
        return service.submit_answer(session_id, body["instance_id"], body["answer"])

    @app.get("/studies/{study_id}/results")
    async def get_results(study_id: str) -> dict[str, Any]:
        return service.export_results(study_id)

    return app
