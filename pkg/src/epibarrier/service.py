"""HTTP/JSON facade for the steering sandbox.

One scenario per process.  Region, barrier, and classification artifacts are
computed once at startup and served from memory; simulation sessions are
in-memory with LRU eviction, mutations serialized per session.
"""
from __future__ import annotations

import secrets
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import _jsonio
from .barrier import compute_barrier, BarrierCurve
from .classifier import Case, classify
from .model import Face, State, constraint_values, in_box
from .policy import DEFAULT_BAND, POLICY, Trajectory, recommend, simulate
from .region import build_regions, efficiency_ratio
from .scenario import Scenario
from .tangency import SetKind

MAX_SESSIONS = 1024
MAX_STEP_DT = 10.0


def _json_response(payload, status: int = 200) -> Response:
    return Response(
        content=_jsonio.dumps(payload, indent=0),
        status_code=status,
        media_type="application/json",
    )


def _error(status: int, code: str, message: str, **extra) -> Response:
    return _json_response({"code": code, "message": message, **extra}, status)


@dataclass
class Session:
    id: str
    state: State
    clock: float = 0.0
    mode: str = "manual"
    history: list[dict] = field(default_factory=list)
    violation: tuple[float, Face] | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "mode": self.mode,
            "t": self.clock,
            "state": list(self.state),
            "violation": _violation_dict(self.violation),
            "history": list(self.history),
        }


def _violation_dict(v: tuple[float, Face] | None) -> dict | None:
    if v is None:
        return None
    return {"t": v[0], "face": v[1].value}


def create_app(scenario: Scenario, ui_dir: Path | str | None = None) -> FastAPI:
    p = scenario.params
    caps = scenario.caps
    # Advice served to the steering UI uses the closed-loop proximity band,
    # so the banner flips to the maximal-rate warning when the state comes
    # near the admissible boundary rather than only when it touches it.
    eps = max(scenario.run.membership_eps, DEFAULT_BAND)

    cls = classify(p, caps)
    curves: dict[SetKind, BarrierCurve | None] = {SetKind.ADMISSIBLE: None, SetKind.MRPI: None}
    if cls.case in (Case.VIABLE, Case.COMFORTABLE_VIABLE):
        curves[SetKind.ADMISSIBLE] = compute_barrier(p, caps, SetKind.ADMISSIBLE)
    if cls.case is Case.COMFORTABLE_VIABLE:
        curves[SetKind.MRPI] = compute_barrier(p, caps, SetKind.MRPI)
    build_input = {k: v for k, v in curves.items() if v is not None}
    admissible, mrpi = build_regions(p, caps, cls, build_input)
    ratio = efficiency_ratio(mrpi, admissible)

    sessions: OrderedDict[str, Session] = OrderedDict()
    sessions_lock = threading.Lock()

    app = FastAPI(title="epibarrier service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def get_session(session_id: str) -> Session | None:
        with sessions_lock:
            s = sessions.get(session_id)
            if s is not None:
                sessions.move_to_end(session_id)
            return s

    def advice_payload(x: State) -> dict:
        if in_box(x, caps):
            adv = recommend(x, admissible, mrpi, cls, caps, eps=eps)
            return adv.to_json_dict()
        # The state has left the cap box: no admissible input can help.
        return {
            "action": "relax_caps_or_increase_fumigation",
            "rationale": "the state has left the cap box",
            "in_admissible": {"status": "outside", "distance": max(constraint_values(x, caps))},
            "in_mrpi": {"status": "outside", "distance": max(constraint_values(x, caps))},
        }

    @app.get("/api/scenario")
    def get_scenario() -> Response:
        return _json_response(scenario.to_json_dict())

    @app.get("/api/classification")
    def get_classification() -> Response:
        return _json_response(cls.to_json_dict())

    @app.get("/api/regions")
    def get_regions() -> Response:
        return _json_response(
            {
                "case": cls.case.value,
                "admissible": admissible.to_json_dict(),
                "mrpi": mrpi.to_json_dict(),
                "efficiency_ratio": ratio,
            }
        )

    @app.get("/api/barriers")
    def get_barriers() -> Response:
        return _json_response(
            {
                "admissible": (
                    curves[SetKind.ADMISSIBLE].to_json_dict()
                    if curves[SetKind.ADMISSIBLE]
                    else None
                ),
                "mrpi": (
                    curves[SetKind.MRPI].to_json_dict() if curves[SetKind.MRPI] else None
                ),
            }
        )

    async def _body(request: Request) -> dict | None:
        try:
            data = await request.json()
        except Exception:
            return None
        return data if isinstance(data, dict) else None

    def _parse_x0(body: dict):
        x0 = body.get("x0")
        if (
            not isinstance(x0, (list, tuple))
            or len(x0) != 2
            or not all(isinstance(v, (int, float)) for v in x0)
        ):
            return None
        pt = (float(x0[0]), float(x0[1]))
        if not (0.0 <= pt[0] <= 1.0 and 0.0 <= pt[1] <= 1.0):
            return None
        return pt

    @app.post("/api/session")
    async def create_session(request: Request) -> Response:
        body = await _body(request)
        if body is None:
            return _error(400, "bad_request", "body must be a JSON object")
        x0 = _parse_x0(body)
        if x0 is None:
            return _error(400, "bad_request", "x0 must be [x1, x2] within [0, 1]^2")
        mode = body.get("mode", "manual")
        if mode not in ("manual", "policy"):
            return _error(400, "bad_request", "mode must be 'manual' or 'policy'")
        session = Session(id=secrets.token_hex(16), state=x0, mode=mode)
        session.history.append({"t": 0.0, "x1": x0[0], "x2": x0[1], "u": None})
        with sessions_lock:
            sessions[session.id] = session
            while len(sessions) > MAX_SESSIONS:
                sessions.popitem(last=False)
        return _json_response(
            {"id": session.id, "state": list(x0), "advice": advice_payload(x0)}
        )

    @app.get("/api/session/{session_id}")
    def get_session_state(session_id: str) -> Response:
        s = get_session(session_id)
        if s is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        with s.lock:
            return _json_response(s.snapshot())

    @app.post("/api/session/{session_id}/reset")
    async def reset_session(session_id: str, request: Request) -> Response:
        s = get_session(session_id)
        if s is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        body = await _body(request)
        if body is None:
            return _error(400, "bad_request", "body must be a JSON object")
        x0 = _parse_x0(body)
        if x0 is None:
            return _error(400, "bad_request", "x0 must be [x1, x2] within [0, 1]^2")
        with s.lock:
            s.state = x0
            s.clock = 0.0
            s.history.clear()
            s.history.append({"t": 0.0, "x1": x0[0], "x2": x0[1], "u": None})
            s.violation = None
            return _json_response(
                {"id": s.id, "state": list(x0), "advice": advice_payload(x0)}
            )

    @app.post("/api/session/{session_id}/step")
    async def step_session(session_id: str, request: Request) -> Response:
        s = get_session(session_id)
        if s is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        body = await _body(request)
        if body is None:
            return _error(400, "bad_request", "body must be a JSON object")
        u_raw = body.get("u")
        dt = body.get("dt", 1.0)
        if not isinstance(dt, (int, float)) or not (0.0 < float(dt) <= MAX_STEP_DT):
            return _error(400, "bad_request", f"dt must lie in (0, {MAX_STEP_DT}]")
        if u_raw is not None and not isinstance(u_raw, (int, float)):
            return _error(400, "bad_request", "u must be a number")
        with s.lock:
            if s.violation is not None:
                return _error(
                    409,
                    "violated",
                    "session has violated a cap; reset before stepping",
                    violation=_violation_dict(s.violation),
                )
            clamped = False
            if s.mode == "policy":
                traj: Trajectory = simulate(
                    p, caps, s.state, POLICY, float(dt), t0=s.clock,
                    regions=(admissible, mrpi), classification=cls,
                )
            else:
                if u_raw is None:
                    return _error(400, "bad_request", "u is required in manual mode")
                u = float(u_raw)
                if u < p.u_min:
                    u, clamped = p.u_min, True
                elif u > p.u_max:
                    u, clamped = p.u_max, True
                traj = simulate(p, caps, s.state, u, float(dt), t0=s.clock)
            s.state = traj.final_state
            s.clock = traj.final_time
            u_applied = traj.samples[0][2]
            s.history.append(
                {"t": s.clock, "x1": s.state[0], "x2": s.state[1], "u": u_applied}
            )
            if traj.violation is not None:
                s.violation = traj.violation
            advice = advice_payload(s.state)
            return _json_response(
                {
                    "state": list(s.state),
                    "t": s.clock,
                    "clamped": clamped,
                    "u_applied": u_applied,
                    "violation": _violation_dict(s.violation),
                    "advice": advice,
                    "membership": {
                        "admissible": advice["in_admissible"],
                        "mrpi": advice["in_mrpi"],
                    },
                }
            )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
