"""HTTP session service: levels, play sessions, and replayable transcripts.

State of record is an append-only action log per session, persisted as
one JSON document in a directory store. Because the engine is fully
deterministic, replaying a session's log reproduces its exact state —
the transcript export, crash recovery, and the persistence format are
all the same mechanism.

Every successful mutating call bumps the session's revision by exactly
one. Clients may send their last-seen revision with a mutation to get a
409 conflict instead of acting on a stale view; lever previews are
read-only and never bump anything.
"""
from __future__ import annotations

import json
import os
import secrets
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import analysis, levels, story
from .errors import GameError
from .levels import GameState, LevelSpec

MODE_TOMBS = "TOMBS"
MODE_STORY = "STORY"

STORE_ENV = "TOMERIA_STORE"
UI_ENV = "TOMERIA_UI"

_STATUS_BY_CODE = {
    "invalid-argument": 400,
    "mode-mismatch": 400,
    "not-found": 404,
    "illegal-move": 409,
    "peek-budget-exhausted": 409,
    "story-already-ended": 409,
    "revision-conflict": 409,
    "capacity": 413,
    "placement-failure": 422,
}

__all__ = ["DirectoryStore", "create_app", "ServiceError", "STORE_ENV", "UI_ENV"]


class ServiceError(Exception):
    """An error with a stable code that maps onto an HTTP status."""

    def __init__(self, code: str, message: str, extra: dict | None = None) -> None:
        super().__init__(message)
        self.code = code
        self.extra = extra or {}

    @property
    def status(self) -> int:
        return _STATUS_BY_CODE.get(self.code, 500)


class DirectoryStore:
    """One JSON document per object, under <root>/<kind>/<id>.json."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        for kind in ("levels", "sessions"):
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, obj_id: str) -> Path:
        if not obj_id.replace("-", "").isalnum():
            raise ServiceError("invalid-argument", f"malformed id {obj_id!r}")
        return self.root / kind / f"{obj_id}.json"

    def put(self, kind: str, obj_id: str, doc: dict) -> None:
        path = self._path(kind, obj_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    def get(self, kind: str, obj_id: str) -> dict | None:
        path = self._path(kind, obj_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


class _SessionRuntime:
    """In-memory live state for one session, rebuilt from its log on demand."""

    def __init__(self, doc: dict) -> None:
        self.lock = threading.Lock()
        self.doc = doc
        self.mode = doc["mode"]
        self.spec: LevelSpec | None = None
        self.game: GameState | None = None
        self.session: story.StorySession | None = None

    def replay(self, spec_by_level) -> None:
        if self.mode == MODE_TOMBS:
            self.spec = spec_by_level(self.doc["levelId"])
            state = levels.new_game(self.spec)
            for action in self.doc["actions"]:
                if action["op"] == "move":
                    state = levels.move(state, action["arg"])
                elif action["op"] == "flip":
                    state = levels.flip(state, action["arg"])
                else:
                    raise ServiceError("invalid-argument", f"bad action {action}")
            self.game = state
        else:
            p = self.doc["storyParams"]
            tree = story.generate_story_tree(p["seed"], p["branching"], p["depth"])
            session = story.new_session(tree, p["sessionSeed"])
            for action in self.doc["actions"]:
                if action["op"] == "peek":
                    session.peek(action["choice"], action["d"])
                elif action["op"] == "choose":
                    session.choose(action["choice"])
                else:
                    raise ServiceError("invalid-argument", f"bad action {action}")
            self.session = session


class _Service:
    def __init__(self, store: DirectoryStore) -> None:
        self.store = store
        self._runtimes: dict[str, _SessionRuntime] = {}
        self._specs: dict[str, LevelSpec] = {}
        self._lock = threading.Lock()

    # -- levels ------------------------------------------------------------

    def create_level(self, body: dict) -> dict:
        if not isinstance(body, dict):
            raise ServiceError("invalid-argument", "request body must be a JSON object")
        try:
            if "exit" in body:
                spec = levels.spec_from_dict(body)
            else:
                spec = self._design(body)
        except ValueError as exc:
            raise ServiceError("invalid-argument", str(exc)) from None
        report = analysis.analyze(spec)
        level_id = secrets.token_hex(8)
        doc = {
            "levelId": level_id,
            "spec": levels.spec_to_dict(spec),
            "report": analysis.report_to_dict(report),
        }
        self.store.put("levels", level_id, doc)
        with self._lock:
            self._specs[level_id] = spec
        return doc

    def _design(self, body: dict) -> LevelSpec:
        allowed = {"base", "levers", "start", "minFlipsAtLeast", "treasureCount"}
        unknown = set(body) - allowed
        if unknown:
            raise ValueError(f"unknown design request keys: {sorted(unknown)}")
        if "base" not in body:
            raise ValueError("design request needs a base object")
        try:
            b = body["base"]
            base = levels.GenParams(
                seed=b["seed"], width=b["width"], height=b["height"],
                irc=b["irc"], noi=b["noi"],
                rule=levels.CaRule(block_threshold=b.get("blockThreshold", 5)),
            )
            raw = body.get("levers", 4)
            if isinstance(raw, int):
                lever_suite = analysis.default_levers(base, raw)
            else:
                lever_suite = tuple(
                    levels.Lever(
                        id=lv["id"],
                        cell=(lv["cell"][0], lv["cell"][1]),
                        axis=lv["axis"],
                        delta=lv["delta"],
                    )
                    for lv in raw
                )
            start = None
            if body.get("start") is not None:
                start = (body["start"][0], body["start"][1])
        except KeyError as exc:
            raise ValueError(f"missing design request key: {exc.args[0]}") from None
        except (TypeError, IndexError) as exc:
            raise ValueError(f"malformed design request: {exc}") from None
        return analysis.place_objectives(
            base,
            lever_suite,
            start=start,
            min_flips_at_least=body.get("minFlipsAtLeast", 0),
            treasure_count=body.get("treasureCount", 0),
        )

    def get_level(self, level_id: str) -> dict:
        doc = self.store.get("levels", level_id)
        if doc is None:
            raise ServiceError("not-found", f"no level {level_id}")
        return doc

    def _spec_for(self, level_id: str) -> LevelSpec:
        with self._lock:
            spec = self._specs.get(level_id)
        if spec is None:
            doc = self.get_level(level_id)
            spec = levels.spec_from_dict(doc["spec"])
            with self._lock:
                self._specs[level_id] = spec
        return spec

    # -- sessions ----------------------------------------------------------

    def create_session(self, body: dict) -> dict:
        if not isinstance(body, dict):
            raise ServiceError("invalid-argument", "request body must be a JSON object")
        mode = body.get("mode")
        if mode not in (MODE_TOMBS, MODE_STORY):
            raise ServiceError(
                "invalid-argument", f"mode must be {MODE_TOMBS} or {MODE_STORY}"
            )
        session_id = secrets.token_hex(8)
        doc: dict = {
            "sessionId": session_id,
            "mode": mode,
            "revision": 0,
            "createdAt": _now(),
            "lastActionAt": _now(),
            "actions": [],
        }
        if mode == MODE_TOMBS:
            level_id = body.get("levelId")
            if not isinstance(level_id, str):
                raise ServiceError("invalid-argument", "TOMBS sessions need a levelId")
            self.get_level(level_id)  # 404 if missing
            doc["levelId"] = level_id
        else:
            params = body.get("storyParams")
            if not isinstance(params, dict):
                raise ServiceError("invalid-argument", "STORY sessions need storyParams")
            try:
                doc["storyParams"] = {
                    "seed": int(params["seed"]),
                    "branching": int(params["branching"]),
                    "depth": int(params["depth"]),
                    "sessionSeed": int(params.get("sessionSeed", params["seed"])),
                }
            except (KeyError, TypeError, ValueError):
                raise ServiceError(
                    "invalid-argument",
                    "storyParams needs integer seed, branching, depth",
                ) from None
        runtime = _SessionRuntime(doc)
        try:
            runtime.replay(self._spec_for)
        except ValueError as exc:
            raise ServiceError("invalid-argument", str(exc)) from None
        self.store.put("sessions", session_id, doc)
        with self._lock:
            self._runtimes[session_id] = runtime
        return self.view(runtime)

    def _runtime(self, session_id: str) -> _SessionRuntime:
        with self._lock:
            runtime = self._runtimes.get(session_id)
        if runtime is None:
            doc = self.store.get("sessions", session_id)
            if doc is None:
                raise ServiceError("not-found", f"no session {session_id}")
            runtime = _SessionRuntime(doc)
            runtime.replay(self._spec_for)
            with self._lock:
                runtime = self._runtimes.setdefault(session_id, runtime)
        return runtime

    def _check_mode(self, runtime: _SessionRuntime, wanted: str, op: str) -> None:
        if runtime.mode != wanted:
            raise ServiceError(
                "mode-mismatch", f"{op} applies to {wanted} sessions, not {runtime.mode}"
            )

    def _check_revision(self, runtime: _SessionRuntime, body: dict) -> None:
        sent = body.get("revision")
        if sent is None:
            return
        current = runtime.doc["revision"]
        if sent != current:
            raise ServiceError(
                "revision-conflict",
                f"revision {sent} is stale (current {current})",
                extra={"revision": current},
            )

    def _commit(self, runtime: _SessionRuntime, action: dict) -> None:
        runtime.doc["actions"].append(action)
        runtime.doc["revision"] += 1
        runtime.doc["lastActionAt"] = _now()
        self.store.put("sessions", runtime.doc["sessionId"], runtime.doc)

    def move(self, session_id: str, body: dict) -> dict:
        runtime = self._runtime(session_id)
        self._check_mode(runtime, MODE_TOMBS, "move")
        with runtime.lock:
            self._check_revision(runtime, body)
            direction = body.get("dir")
            if not isinstance(direction, str):
                raise ServiceError("invalid-argument", "move needs a dir of N/E/S/W")
            try:
                runtime.game = levels.move(runtime.game, direction)
            except ValueError as exc:
                raise ServiceError("invalid-argument", str(exc)) from None
            self._commit(runtime, {"op": "move", "arg": direction})
            return self.view(runtime)

    def flip(self, session_id: str, body: dict) -> dict:
        runtime = self._runtime(session_id)
        self._check_mode(runtime, MODE_TOMBS, "flip")
        with runtime.lock:
            self._check_revision(runtime, body)
            lever = body.get("lever")
            if not isinstance(lever, int) or isinstance(lever, bool):
                raise ServiceError("invalid-argument", "flip needs an integer lever id")
            try:
                runtime.game = levels.flip(runtime.game, lever)
            except ValueError as exc:
                raise ServiceError("invalid-argument", str(exc)) from None
            self._commit(runtime, {"op": "flip", "arg": lever})
            return self.view(runtime)

    def preview(self, session_id: str, lever: int) -> dict:
        runtime = self._runtime(session_id)
        self._check_mode(runtime, MODE_TOMBS, "preview")
        with runtime.lock:
            try:
                cells = levels.preview_diff(runtime.game, lever)
            except ValueError as exc:
                raise ServiceError("invalid-argument", str(exc)) from None
            return {
                "lever": lever,
                "cells": [[x, y] for x, y in sorted(cells, key=lambda c: (c[1], c[0]))],
                "revision": runtime.doc["revision"],
            }

    def peek(self, session_id: str, body: dict) -> dict:
        runtime = self._runtime(session_id)
        self._check_mode(runtime, MODE_STORY, "peek")
        with runtime.lock:
            self._check_revision(runtime, body)
            choice, d = body.get("choice"), body.get("d")
            if not isinstance(choice, int) or not isinstance(d, int):
                raise ServiceError("invalid-argument", "peek needs integer choice and d")
            try:
                vision = runtime.session.peek(choice, d)
            except ValueError as exc:
                raise ServiceError("invalid-argument", str(exc)) from None
            self._commit(runtime, {"op": "peek", "choice": choice, "d": d})
            return {
                "vision": {
                    "choice": vision.choice,
                    "d": vision.depth,
                    "futuresCount": vision.futures_count,
                    "revealed": vision.revealed_dict(),
                },
                "revision": runtime.doc["revision"],
            }

    def choose(self, session_id: str, body: dict) -> dict:
        runtime = self._runtime(session_id)
        self._check_mode(runtime, MODE_STORY, "choose")
        with runtime.lock:
            self._check_revision(runtime, body)
            choice = body.get("choice")
            if not isinstance(choice, int) or isinstance(choice, bool):
                raise ServiceError("invalid-argument", "choose needs an integer choice")
            try:
                runtime.session.choose(choice)
            except ValueError as exc:
                raise ServiceError("invalid-argument", str(exc)) from None
            self._commit(runtime, {"op": "choose", "choice": choice})
            return self.view(runtime)

    def transcript(self, session_id: str) -> dict:
        runtime = self._runtime(session_id)
        with runtime.lock:
            return json.loads(json.dumps(runtime.doc))

    def view_by_id(self, session_id: str) -> dict:
        runtime = self._runtime(session_id)
        with runtime.lock:
            return self.view(runtime)

    # -- views -------------------------------------------------------------

    def view(self, runtime: _SessionRuntime) -> dict:
        doc = runtime.doc
        base = {
            "sessionId": doc["sessionId"],
            "mode": doc["mode"],
            "revision": doc["revision"],
        }
        if runtime.mode == MODE_TOMBS:
            game = runtime.game
            spec = game.spec
            grid = levels.realize(spec, game.config)
            rows = [
                "".join("#" if cell else "." for cell in row) for row in grid.blocks
            ]
            base.update(
                {
                    "levelId": doc["levelId"],
                    "spec": levels.spec_to_dict(spec),
                    "config": game.config.to_string(),
                    "player": [game.player[0], game.player[1]],
                    "collected": [[x, y] for x, y in sorted(game.collected, key=lambda c: (c[1], c[0]))],
                    "flipCount": game.flip_count,
                    "complete": game.complete,
                    "grid": rows,
                }
            )
        else:
            session = runtime.session
            node = session.current
            base.update(
                {
                    "storyParams": doc["storyParams"],
                    "sceneId": node.id,
                    "sceneText": node.scene_text,
                    "attributes": node.attributes.as_dict(),
                    "choiceLabels": list(node.choice_labels),
                    "depth": node.depth,
                    "remainingDepth": session.remaining_depth,
                    "peeked": sorted(session.peeked),
                    "path": list(session.path),
                    "ended": session.ended,
                }
            )
        return base


def _error_response(exc: ServiceError) -> JSONResponse:
    body = {"error": str(exc), "code": exc.code}
    body.update(exc.extra)
    return JSONResponse(status_code=exc.status, content=body)


def create_app(store_path: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the ASGI app over a directory store.

    `store_path` defaults to the TOMERIA_STORE environment variable,
    then ./tomeria-store. If `ui_dir` (or TOMERIA_UI) names a directory,
    it is served statically at / for the browser client.
    """
    if store_path is None:
        store_path = os.environ.get(STORE_ENV, "tomeria-store")
    service = _Service(DirectoryStore(store_path))
    app = FastAPI(title="tomeria", docs_url=None, redoc_url=None)

    @app.exception_handler(ServiceError)
    async def on_service_error(request: Request, exc: ServiceError):
        return _error_response(exc)

    @app.exception_handler(GameError)
    async def on_game_error(request: Request, exc: GameError):
        return _error_response(ServiceError(exc.code, str(exc)))

    @app.exception_handler(ValueError)
    async def on_value_error(request: Request, exc: ValueError):
        return _error_response(ServiceError("invalid-argument", str(exc)))

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error_response(ServiceError("invalid-argument", "malformed request body"))

    async def read_json(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ServiceError("invalid-argument", "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise ServiceError("invalid-argument", "request body must be a JSON object")
        return body

    @app.post("/levels")
    async def post_levels(request: Request):
        return service.create_level(await read_json(request))

    @app.get("/levels/{level_id}")
    async def get_level(level_id: str):
        return service.get_level(level_id)

    @app.post("/sessions")
    async def post_sessions(request: Request):
        return service.create_session(await read_json(request))

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return service.view_by_id(session_id)

    @app.post("/sessions/{session_id}/move")
    async def post_move(session_id: str, request: Request):
        return service.move(session_id, await read_json(request))

    @app.post("/sessions/{session_id}/flip")
    async def post_flip(session_id: str, request: Request):
        return service.flip(session_id, await read_json(request))

    @app.get("/sessions/{session_id}/preview/{lever}")
    async def get_preview(session_id: str, lever: int):
        return service.preview(session_id, lever)

    @app.post("/sessions/{session_id}/peek")
    async def post_peek(session_id: str, request: Request):
        return service.peek(session_id, await read_json(request))

    @app.post("/sessions/{session_id}/choose")
    async def post_choose(session_id: str, request: Request):
        return service.choose(session_id, await read_json(request))

    @app.get("/sessions/{session_id}/transcript")
    async def get_transcript(session_id: str):
        return service.transcript(session_id)

    if ui_dir is None:
        ui_dir = os.environ.get(UI_ENV)
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
