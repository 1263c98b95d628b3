"""HTTP facade over conversation sessions for the companion chat UI.

Endpoints (documented in docs/http-api.md):
  POST /sessions                    create a session      -> {session_id, seed}
  POST /sessions/{id}/messages      run one turn          -> turn document
  GET  /sessions/{id}/history       turn documents so far
  GET  /datasets                    descriptors + schema + sample rows
  GET  /artifacts/{id}              SVG bytes (or a CSV sidecar)

Sessions are isolated; message handling within one session is serialized by
a per-session lock, so concurrent posts queue in arrival order.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from .errors import DatadeskError
from .pipeline.agent import DeterministicAgent, LlmAgent
from .pipeline.session import ChatTurn, Session, SessionConfig, serialize_table, turn_document
from .store.registry import Registry

AGENTS = ("deterministic", "llm")
SAMPLE_ROWS = 5


class CreateSessionBody(BaseModel):
    seed: int = 42
    agent: str = "deterministic"


class MessageBody(BaseModel):
    text: str


class _SessionSlot:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        self.documents: list[dict] = []


def _service_turn_document(turn: ChatTurn, session_id: str) -> dict:
    document = turn_document(turn)
    document["artifacts"] = [
        {"id": f"{session_id}/{record.path.name}", "kind": record.kind}
        for record in turn.artifacts
    ]
    return document


def create_app(
    manifest_path: str | Path,
    artifact_root: str | Path,
    geometry_path: str | Path | None = None,
    region_property: str = "district",
    model_dir: str | Path | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    app = FastAPI(title="datadesk chat service")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    artifact_root = Path(artifact_root)
    state: dict = {"registry": None, "load_error": None}
    try:
        state["registry"] = Registry(manifest_path)
    except DatadeskError as exc:
        state["load_error"] = exc.message

    sessions: dict[str, _SessionSlot] = {}
    sessions_lock = threading.Lock()

    def registry_or_503() -> Registry:
        if state["registry"] is None:
            raise HTTPException(503, detail=f"manifest failed to load: {state['load_error']}")
        return state["registry"]

    def slot_or_404(session_id: str) -> _SessionSlot:
        with sessions_lock:
            slot = sessions.get(session_id)
        if slot is None:
            raise HTTPException(404, detail=f"unknown session {session_id!r}")
        return slot

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody | None = None):
        registry = registry_or_503()
        body = body or CreateSessionBody()
        if body.agent not in AGENTS:
            raise HTTPException(400, detail=f"unknown agent {body.agent!r}; use one of {AGENTS}")
        session_id = uuid.uuid4().hex[:12]
        config = SessionConfig(
            out_dir=artifact_root / session_id,
            model_dir=Path(model_dir) if model_dir else None,
            geometry_path=Path(geometry_path) if geometry_path else None,
            region_property=region_property,
            seed=body.seed,
        )
        try:
            agent = LlmAgent() if body.agent == "llm" else DeterministicAgent()
        except DatadeskError as exc:
            raise HTTPException(400, detail=exc.message)
        session = Session(registry, config, agent=agent, session_id=session_id)
        with sessions_lock:
            sessions[session_id] = _SessionSlot(session)
        return {"session_id": session_id, "seed": body.seed}

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        slot = slot_or_404(session_id)
        if not body.text or not body.text.strip():
            raise HTTPException(422, detail="message text must be non-empty")
        with slot.lock:
            turn = slot.session.run_turn(body.text)
            document = _service_turn_document(turn, session_id)
            slot.documents.append(document)
        return document

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str):
        slot = slot_or_404(session_id)
        with slot.lock:
            return list(slot.documents)

    @app.get("/datasets")
    def datasets():
        registry = registry_or_503()
        out = []
        for descriptor in registry.descriptors():
            table = registry.table(descriptor.name)
            sample = serialize_table(table.take(list(range(min(SAMPLE_ROWS, table.row_count)))))
            out.append(
                {
                    "name": descriptor.name,
                    "description": descriptor.description,
                    "rows": table.row_count,
                    "schema": [{"name": n, "kind": k.value} for n, k in table.schema],
                    "sample": sample["rows"],
                }
            )
        return out

    @app.get("/artifacts/{artifact_id:path}")
    def artifact(artifact_id: str):
        path = (artifact_root / artifact_id).resolve()
        root = artifact_root.resolve()
        if root not in path.parents or not path.is_file():
            raise HTTPException(404, detail=f"unknown artifact {artifact_id!r}")
        media = "image/svg+xml" if path.suffix == ".svg" else "text/csv; charset=utf-8"
        return Response(content=path.read_bytes(), media_type=media)

    return app
