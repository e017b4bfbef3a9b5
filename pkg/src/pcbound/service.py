"""JSON-over-HTTP session service.

A session is one immutable p-value vector plus its analysis settings.
Creating a session computes the bound report; selection bounds are served
from a lattice built lazily on first request and cached. Errors use one
shape throughout: {"error": {"code": ..., "message": ...}}.

Sessions live in process memory. With ``snapshot_dir`` set, each session
is also written to <snapshot_dir>/<session_id>.json and loaded back on
startup, so a restart keeps the same session ids working.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
import warnings
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.middleware.cors import CORSMiddleware

from .closedtest import LATTICE_CAP, IntersectionLattice, build_lattice, selection_bound
from .conjunction import BoundReport, report_bound
from .core import AnalysisConfig, PValueVector, ValidationError, parse_pvalues

SERVICE_MAX_N = 10_000

logger = logging.getLogger("pcbound.service")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class Session:
    """One loaded vector with its config, report, and lazily built lattice."""

    def __init__(self, session_id: str, created_at: str, vector: PValueVector, config: AnalysisConfig):
        self.id = session_id
        self.created_at = created_at
        self.vector = vector
        self.config = config
        self.report: BoundReport = report_bound(vector, config)
        self._lattice: IntersectionLattice | None = None

    @property
    def lattice_enabled(self) -> bool:
        return self.vector.n <= LATTICE_CAP

    def lattice(self) -> IntersectionLattice:
        # Concurrent first requests may build twice; the results are
        # identical and the second assignment is harmless.
        if self._lattice is None:
            self._lattice = build_lattice(self.vector, self.config)
        return self._lattice

    def payload(self) -> dict:
        return {
            "session_id": self.id,
            "created_at": self.created_at,
            "n": self.vector.n,
            "lattice_enabled": self.lattice_enabled,
            "report": self.report.to_dict(),
        }

    def snapshot(self) -> dict:
        return {
            "session_id": self.id,
            "created_at": self.created_at,
            "alpha": self.config.alpha,
            "combiner": self.config.combiner,
            "hypotheses": [
                {"id": h.id, "p": h.p, "family": h.family} for h in self.vector.hypotheses
            ],
        }


def _first_error(exc: RequestValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return "invalid request body"
    first = errors[0]
    loc = ".".join(str(part) for part in first.get("loc", ()))
    return f"{loc}: {first.get('msg', 'invalid')}" if loc else first.get("msg", "invalid")


def _check_keys(payload: dict, allowed: set[str]) -> None:
    extra = set(payload) - allowed
    if extra:
        raise ApiError(400, "validation_error", f"unknown key(s): {', '.join(sorted(extra))}")


def create_app(snapshot_dir: "str | Path | None" = None) -> FastAPI:
    app = FastAPI(title="pcbound", version="0.1.0")
    # browser clients (the bundled workbench included) are served from a
    # different origin during development, so answer preflights permissively
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}
    create_lock = threading.Lock()
    snap_path = Path(snapshot_dir) if snapshot_dir else None

    if snap_path:
        snap_path.mkdir(parents=True, exist_ok=True)
        for f in sorted(snap_path.glob("*.json")):
            try:
                data = json.loads(f.read_text(encoding="utf-8"))
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    vector = parse_pvalues(data["hypotheses"])
                session = Session(
                    data["session_id"],
                    data["created_at"],
                    vector,
                    AnalysisConfig(alpha=data["alpha"], combiner=data["combiner"]),
                )
                sessions[session.id] = session
            except (KeyError, ValueError, OSError) as exc:
                logger.warning("skipping snapshot %s: %s", f.name, exc)
        if sessions:
            logger.info("restored %d session(s) from %s", len(sessions), snap_path)

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(RequestValidationError)
    async def _body_error(request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "validation_error", "message": _first_error(exc)}},
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request, exc: StarletteHTTPException):
        code = "not_found" if exc.status_code == 404 else "http_error"
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": {"code": code, "message": str(exc.detail)}},
        )

    def _get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise ApiError(404, "not_found", f"no session {session_id!r}")
        return session

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        _check_keys(payload, {"hypotheses", "alpha", "combiner"})
        hypotheses = payload.get("hypotheses")
        if not isinstance(hypotheses, list) or not hypotheses:
            raise ApiError(
                400, "validation_error", "body must include a non-empty 'hypotheses' array"
            )
        if len(hypotheses) > SERVICE_MAX_N:
            raise ApiError(
                413,
                "too_large",
                f"at most {SERVICE_MAX_N} hypotheses per session, got {len(hypotheses)}",
            )
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                vector = parse_pvalues(hypotheses)
            config = AnalysisConfig(
                alpha=payload.get("alpha", 0.05),
                combiner=payload.get("combiner", "fisher"),
            )
        except ValidationError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None
        session = Session(
            uuid.uuid4().hex,
            datetime.now(timezone.utc).isoformat(),
            vector,
            config,
        )
        for w in caught:
            logger.warning("session %s: %s", session.id, w.message)
        with create_lock:
            sessions[session.id] = session
            if snap_path:
                try:
                    (snap_path / f"{session.id}.json").write_text(
                        json.dumps(session.snapshot()), encoding="utf-8"
                    )
                except OSError as exc:
                    logger.warning("could not snapshot session %s: %s", session.id, exc)
        logger.info(
            "session %s created: n=%d alpha=%g combiner=%s u_max=%d",
            session.id,
            vector.n,
            config.alpha,
            config.combiner,
            session.report.u_max,
        )
        return session.payload()

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str):
        return _get_session(session_id).payload()

    @app.post("/sessions/{session_id}/selection")
    def post_selection(session_id: str, payload: dict = Body(...)):
        session = _get_session(session_id)
        if not session.lattice_enabled:
            raise ApiError(
                409,
                "lattice_unavailable",
                f"selection bounds need exhaustive closed testing; "
                f"n = {session.vector.n} exceeds the cap of {LATTICE_CAP}",
            )
        _check_keys(payload, {"ids"})
        ids = payload.get("ids")
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise ApiError(400, "validation_error", "'ids' must be an array of strings")
        try:
            bound = selection_bound(session.lattice(), ids)
        except ValidationError as exc:
            raise ApiError(400, "validation_error", str(exc)) from None
        result = bound.to_dict()
        result["session_id"] = session.id
        return result

    return app
