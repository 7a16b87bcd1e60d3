"""HTTP service exposing annotation sessions and live agreement statistics.

Sessions live in memory; with a state directory every accepted submission is
appended to a per-session JSONL event log, and restarting the service
replays those logs back to identical session state.  Clients are untrusted:
every labeling request is re-validated server-side before it is recorded.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Header, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import agreement as agreement_mod
from . import annotate
from ._util import sha256_hex
from .corpus import LabelPath


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


# --------------------------------------------------------------------------
# catalog resource
# --------------------------------------------------------------------------

def _rule_obj(rule: annotate.GuidelineRule) -> dict:
    return {
        "id": rule.id,
        "stage": rule.stage,
        "verdict": rule.verdict,
        "prompt": rule.prompt,
        "example": rule.example,
        "mto_based": rule.mto_based,
    }


CATALOG: tuple[dict, ...] = tuple(_rule_obj(r) for r in annotate.rule_catalog())
CATALOG_VERSION = sha256_hex(
    json.dumps(CATALOG, sort_keys=True, ensure_ascii=False).encode("utf-8")
)[:16]


# --------------------------------------------------------------------------
# session store with append-only event logs
# --------------------------------------------------------------------------

@dataclass
class SessionState:
    session: annotate.AnnotationSession
    token: str
    texts: dict[str, str]
    lock: threading.Lock = field(default_factory=threading.Lock)


class Store:
    def __init__(self, state_dir: Path | None = None):
        self.state_dir = state_dir
        self.sessions: dict[str, SessionState] = {}
        self._lock = threading.Lock()
        if state_dir is not None:
            state_dir.mkdir(parents=True, exist_ok=True)
            for log in sorted(state_dir.glob("*.jsonl")):
                self._load_log(log)

    def _load_log(self, path: Path) -> None:
        with open(path, encoding="utf-8") as fh:
            events = [json.loads(line) for line in fh if line.strip()]
        if not events:
            return
        session = annotate.replay_events(events)
        opened = events[0]
        self.sessions[session.session_id] = SessionState(
            session=session,
            token=opened.get("token", ""),
            texts=dict(opened.get("texts", {})),
        )

    def _log_path(self, session_id: str) -> Path | None:
        if self.state_dir is None:
            return None
        return self.state_dir / f"{session_id}.jsonl"

    def _append(self, session_id: str, event: dict) -> None:
        path = self._log_path(session_id)
        if path is None:
            return
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")

    def create(self, annotator: str, comments: list[tuple[str, str]], session_id: str | None) -> SessionState:
        with self._lock:
            sid = session_id or f"s-{secrets.token_hex(6)}"
            if sid in self.sessions:
                raise ApiError(409, "session_exists", f"session {sid!r} already exists")
            try:
                session = annotate.AnnotationSession(
                    session_id=sid,
                    annotator=annotator,
                    queue=tuple(cid for cid, _ in comments),
                )
            except ValueError as exc:
                raise ApiError(422, "invalid_session", str(exc)) from exc
            state = SessionState(
                session=session,
                token=secrets.token_hex(16),
                texts={cid: text for cid, text in comments},
            )
            self.sessions[sid] = state
            opened = annotate.session_events(session)[0]
            opened["texts"] = state.texts
            opened["token"] = state.token
            self._append(sid, opened)
            return state

    def get(self, session_id: str) -> SessionState:
        state = self.sessions.get(session_id)
        if state is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return state

    def record(self, state: SessionState, comment_id: str, path: LabelPath) -> None:
        """Apply one submission and append its event; caller holds the lock."""
        state.session = annotate.submit(state.session, comment_id, path)
        event = annotate.session_events(state.session)[-1]
        self._append(state.session.session_id, event)


# --------------------------------------------------------------------------
# wire shapes
# --------------------------------------------------------------------------

class CommentIn(BaseModel):
    id: str
    text: str


class SessionCreate(BaseModel):
    annotator: str
    comments: list[CommentIn]
    session_id: str | None = None


class PathIn(BaseModel):
    top: str
    structure: str | None = None
    fine: str | None = None
    rules: list[str] | None = None


class LabelIn(BaseModel):
    comment_id: str
    rules: list[str]
    path: PathIn | None = None


def _path_obj(path: LabelPath) -> dict:
    return {
        "top": path.top,
        "structure": path.structure,
        "fine": path.fine,
        "rules": list(path.rules),
    }


def _next_obj(state: SessionState) -> dict | None:
    cid = state.session.next_comment()
    if cid is None:
        return None
    return {"id": cid, "text": state.texts.get(cid, ""), "position": state.session.cursor}


def _resource(state: SessionState) -> dict:
    s = state.session
    total = len(s.queue)
    out = {
        "session_id": s.session_id,
        "annotator": s.annotator,
        "total": total,
        "decided": len(s.decisions),
        "progress": (len(s.decisions) / total) if total else 1.0,
        "catalog_version": CATALOG_VERSION,
    }
    nxt = _next_obj(state)
    if nxt is not None:
        out["next"] = nxt
    return out


# --------------------------------------------------------------------------
# application
# --------------------------------------------------------------------------

def create_app(state_dir: Path | None = None, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="annotation service", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = Store(state_dir)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def on_bad_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"code": "invalid_body", "message": str(exc.errors())}
        )

    @app.get("/api/catalog")
    def get_catalog(request: Request, response: Response, stage: str | None = None):
        rules = CATALOG
        if stage is not None:
            if stage not in annotate.STAGES:
                raise ApiError(400, "unknown_stage", f"no stage {stage!r}")
            rules = tuple(r for r in CATALOG if r["stage"] == stage)
        etag = f'"{CATALOG_VERSION}"'
        response.headers["ETag"] = etag
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        return {"version": CATALOG_VERSION, "rules": list(rules)}

    @app.get("/api/sessions")
    def list_sessions():
        return {
            "sessions": [
                {
                    "session_id": st.session.session_id,
                    "annotator": st.session.annotator,
                    "total": len(st.session.queue),
                    "decided": len(st.session.decisions),
                }
                for st in store.sessions.values()
            ]
        }

    @app.post("/api/sessions", status_code=201)
    def create_session(body: SessionCreate):
        state = store.create(
            body.annotator,
            [(c.id, c.text) for c in body.comments],
            body.session_id,
        )
        out = _resource(state)
        out["token"] = state.token
        return out

    @app.get("/api/session/{session_id}")
    def get_session(session_id: str):
        return _resource(store.get(session_id))

    @app.get("/api/session/{session_id}/next")
    def get_next(session_id: str):
        state = store.get(session_id)
        nxt = _next_obj(state)
        return {"comment": nxt, "complete": nxt is None}

    @app.post("/api/session/{session_id}/label")
    def post_label(
        session_id: str,
        body: LabelIn,
        amend: bool = False,
        x_session_token: str | None = Header(default=None),
    ):
        state = store.get(session_id)
        with state.lock:
            if state.token and x_session_token != state.token:
                raise ApiError(401, "bad_token", "missing or wrong session token")
            session = state.session
            if body.comment_id not in session.queue:
                raise ApiError(
                    404, "unknown_comment", f"comment {body.comment_id!r} not in queue"
                )
            if body.comment_id in session.decisions and not amend:
                raise ApiError(
                    409, "already_labeled",
                    f"comment {body.comment_id!r} already labeled; pass ?amend=true",
                )
            try:
                path = annotate.decide(body.rules)
            except (ValueError, KeyError) as exc:
                # every rejection decide can produce is in this family
                detail = exc.args[0] if exc.args else str(exc)
                raise ApiError(422, "invalid_path", str(detail)) from exc
            if body.path is not None:
                claimed = (body.path.top, body.path.structure, body.path.fine)
                if claimed != (path.top, path.structure, path.fine):
                    raise ApiError(
                        422, "path_mismatch",
                        f"client path {claimed} does not match decided path"
                        f" {(path.top, path.structure, path.fine)}",
                    )
            try:
                store.record(state, body.comment_id, path)
            except annotate.OutOfOrder as exc:
                raise ApiError(409, "out_of_order", str(exc)) from exc
            out = _resource(state)
            out["path"] = _path_obj(path)
            out["amended"] = bool(amend and body.comment_id in session.decisions)
            return out

    @app.get("/api/agreement")
    def get_agreement(a: str, b: str, level: str = "top"):
        if level not in ("top", "fine"):
            raise ApiError(400, "unknown_level", f"level must be top or fine, not {level!r}")
        sa, sb = store.get(a), store.get(b)
        da = dict(sa.session.decisions)
        db = dict(sb.session.decisions)
        if not da or not db:
            raise ApiError(409, "insufficient_overlap", "a session has no decisions yet")
        try:
            table = agreement_mod.table_from_sessions(da, db, level, allow_partial=True)
        except agreement_mod.CoverageMismatch as exc:
            raise ApiError(409, "insufficient_overlap", str(exc)) from exc
        try:
            report = agreement_mod.kappa(table)
        except agreement_mod.DegenerateTable as exc:
            raise ApiError(409, "degenerate_table", str(exc)) from exc
        return {
            "level": level,
            "partial": set(da) != set(db),
            "table": {"a": table.a, "b": table.b, "c": table.c, "d": table.d, "n": table.n},
            "po": report.po,
            "pe": report.pe,
            "kappa": report.kappa,
            "se": report.se,
            "ci_low": report.ci_low,
            "ci_high": report.ci_high,
            "disagreements": [
                {"id": cid, "a": la, "b": lb}
                for cid, la, lb in agreement_mod.disagreements(da, db, level)
            ],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
