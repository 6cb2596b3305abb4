"""HTTP JSON API exposing the live recommendation loop.

Sessions are in-memory; the store is shared read-only across handlers and
each session's profile is mutated under its own lock. Every error body has
the shape ``{"error": {"code": ..., "message": ..., "field": ...}}``.
"""

from __future__ import annotations

import json
import mimetypes
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .domain import ImageDoc, InteractionEvent
from .errors import IftError, InvalidInputError, NotFoundError
from .ingest import Store, manifest_to_dict
from .recommend import RankedItem, preference_options, rank_by_scent, search
from .scent import DEFAULT_SCENT, ScentConfig, SessionProfile, update_profile

DEFAULT_K = 20
DEFAULT_PREFERENCES = 5


@dataclass
class Session:
    id: str
    created_at: float
    profile: SessionProfile
    query_terms: set[str]
    pool: list[str]
    selected_preferences: set[str] = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error_body(code: str, message: str, fld: str | None = None) -> dict:
    return {"error": {"code": code, "message": message, "field": fld}}


def _image_payload(image: ImageDoc) -> dict:
    return {
        "id": image.id,
        "uri": image.uri,
        "width": image.width,
        "height": image.height,
        "title": image.title,
        "description": image.description,
        "category": image.category,
        "label": image.label,
        "cues": [
            {
                "id": c.id,
                "kind": c.kind,
                "bbox": c.region.as_bbox() if c.region else None,
                "terms": list(c.terms),
            }
            for c in image.cues
        ],
    }


def _item_payload(item: RankedItem, store: Store) -> dict:
    image = store.images[item.image_id]
    payload = {
        "image_id": item.image_id,
        "score": item.score,
        "matched_cues": list(item.matched_cues),
        "cues": _image_payload(image)["cues"],
        "title": image.title,
        "category": image.category,
        "width": image.width,
        "height": image.height,
    }
    if item.scent is not None:
        payload["scent"] = {
            "raw": item.scent.raw,
            "discounted": item.scent.discounted,
            "text": item.scent.text_component,
            "visual": item.scent.visual_component,
        }
    return payload


def _diet_payload(session: Session) -> dict:
    return {
        "session_id": session.id,
        "diet_total": session.profile.diet_total,
        "iteration": session.profile.iteration,
        "consumed": [
            {"image_id": image_id, "scent": scent} for image_id, scent in session.profile.consumed
        ],
    }


def create_app(
    store: Store,
    config: ScentConfig = DEFAULT_SCENT,
    static_dir: str | None = None,
    session_log_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="iftrec", docs_url=None, redoc_url=None)
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    @app.exception_handler(InvalidInputError)
    async def _invalid(request: Request, exc: InvalidInputError):
        return JSONResponse(
            status_code=422, content=_error_body("invalid_input", str(exc), exc.field)
        )

    @app.exception_handler(NotFoundError)
    async def _missing(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content=_error_body("not_found", str(exc)))

    @app.exception_handler(IftError)
    async def _other(request: Request, exc: IftError):
        return JSONResponse(status_code=400, content=_error_body("error", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def _body_invalid(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = first.get("loc", ())
        fld = str(loc[-1]) if loc else None
        return JSONResponse(
            status_code=422,
            content=_error_body("validation_error", first.get("msg", "invalid request"), fld),
        )

    def _get_session(session_id: str) -> Session:
        with sessions_lock:
            session = sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return session

    def _log_event(session: Session, event: InteractionEvent) -> None:
        if session_log_dir is None:
            return
        path = Path(session_log_dir)
        path.mkdir(parents=True, exist_ok=True)
        entry = {
            "kind": event.kind,
            "image_id": event.image_id,
            "cue_id": event.cue_id,
            "term": event.term,
            "seq": event.seq,
        }
        with open(path / f"{session.id}.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def _recommend(session: Session, k: int) -> dict:
        ranked = rank_by_scent(session.pool, session.profile, store, config)[:k]
        options = preference_options(
            ranked,
            store,
            DEFAULT_PREFERENCES,
            exclude=session.query_terms | session.selected_preferences,
        )
        return {
            "session_id": session.id,
            "items": [_item_payload(item, store) for item in ranked],
            "preferences": options,
            "diet": _diet_payload(session),
        }

    @app.post("/api/sessions", status_code=201)
    def create_session(body: dict):
        query = body.get("query", "")
        if not isinstance(query, str) or not query.strip():
            raise InvalidInputError("query must be a non-empty string", field="query")
        profile = SessionProfile.from_query(query)
        if not profile.term_weights:
            raise InvalidInputError("query is empty after cleaning", field="query")
        session = Session(
            id=uuid.uuid4().hex,
            created_at=time.time(),
            profile=profile,
            query_terms=set(profile.term_weights),
            pool=[item.image_id for item in search(query, store, DEFAULT_K)],
        )
        with sessions_lock:
            sessions[session.id] = session
        with session.lock:
            return _recommend(session, DEFAULT_K)

    @app.get("/api/sessions/{session_id}/recommendations")
    def recommendations(session_id: str, k: int = DEFAULT_K):
        if k < 1:
            raise InvalidInputError("k must be >= 1", field="k")
        session = _get_session(session_id)
        with session.lock:
            return _recommend(session, k)

    @app.post("/api/sessions/{session_id}/events")
    def record_event(session_id: str, body: dict):
        session = _get_session(session_id)
        with session.lock:
            event = InteractionEvent(
                kind=body.get("kind", ""),
                image_id=body.get("image_id"),
                cue_id=body.get("cue_id"),
                term=body.get("term"),
                seq=len(session.profile.events),
            )
            update_profile(session.profile, event, store, config)
            if event.kind == "preference_select":
                session.selected_preferences.add(event.term)
                for item in search(event.term, store, DEFAULT_K):
                    if item.image_id not in session.pool:
                        session.pool.append(item.image_id)
            _log_event(session, event)
            return {
                "ok": True,
                "iteration": session.profile.iteration,
                "diet_total": session.profile.diet_total,
            }

    @app.get("/api/sessions/{session_id}/diet")
    def diet(session_id: str):
        session = _get_session(session_id)
        with session.lock:
            return _diet_payload(session)

    @app.get("/api/images/{image_id}")
    def image_metadata(image_id: str):
        image = store.images.get(image_id)
        if image is None:
            raise NotFoundError(f"unknown image {image_id!r}")
        return _image_payload(image)

    @app.get("/api/images/{image_id}/raw")
    def image_raw(image_id: str):
        image = store.images.get(image_id)
        if image is None:
            raise NotFoundError(f"unknown image {image_id!r}")
        path = Path(image.uri)
        if not path.exists():
            raise NotFoundError(f"image bytes for {image_id!r} are unavailable")
        media_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
        return FileResponse(path, media_type=media_type)

    @app.get("/api/boards/{name}")
    def board(name: str):
        matches = [img for img in store.images.values() if img.category == name]
        if not matches:
            raise NotFoundError(f"no board/category named {name!r}")
        return {"board": name, "images": [_image_payload(img) for img in matches]}

    @app.get("/api/corpus")
    def corpus():
        return {
            "corpus": store.manifest.corpus,
            "size": len(store.images),
            "categories": sorted(store.categories()),
            "manifest": manifest_to_dict(store.manifest),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
