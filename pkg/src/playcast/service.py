"""HTTP prediction service for the chalkboard UI and other clients.

Wire format (JSON, documented in the README): coordinates are meters in
pitch-centered axes, arrays ordered [agent][step][x, y]. Responses carry
the dense trajectories per agent plus the sparse control points the model
actually produced (when it has a sparse head).

Error contract: 400 for malformed bodies/shapes (wrong agent counts,
ragged arrays, non-finite or out-of-pitch coordinates), 422 when a
well-formed request does not fit the loaded model (wrong trajectory
lengths, horizon beyond the trained one, wrong endpoint for the model
kind), 500 never exposes internals.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .models import SceneInput, load_model, predict
from .models.spec import ModelSpec

PITCH_HALF_X = 52.5
PITCH_HALF_Y = 34.0
PITCH_SLACK_M = 10.0


class ScenarioRequest(BaseModel):
    """One prediction scenario; lengths depend on the chosen endpoint."""

    model_id: str | None = None
    frame_rate_hz: float = 10.0
    units: str = "m"
    horizon: int | None = None
    ball: list[list[float]] = Field(min_length=2)
    attackers: list[list[list[float]]] = Field(min_length=11, max_length=11)
    defenders_past: list[list[list[float]]] = Field(min_length=11, max_length=11)


class SpecIncompatible(Exception):
    def __init__(self, message: str):
        self.message = message


class BadScenario(Exception):
    def __init__(self, message: str, field: str):
        self.message = message
        self.field = field


class ModelRegistry:
    """Immutable model snapshot; reload swaps the whole mapping atomically."""

    def __init__(self, models: dict[str, Any], frame_rate_hz: float = 10.0):
        self._models = dict(models)
        self.frame_rate_hz = frame_rate_hz

    @property
    def models(self) -> dict[str, Any]:
        return self._models

    def swap(self, models: dict[str, Any]) -> None:
        self._models = dict(models)

    def get(self, model_id: str | None, conditioned: bool):
        models = self._models  # snapshot
        if model_id is None:
            matching = [m for m in models.values() if m.spec.conditioned == conditioned]
            if len(matching) == 1:
                return matching[0]
            raise SpecIncompatible(
                "model_id required: "
                f"{len(matching)} models serve this endpoint ({sorted(models)})")
        if model_id not in models:
            raise SpecIncompatible(f"unknown model_id {model_id!r}; loaded: {sorted(models)}")
        model = models[model_id]
        if model.spec.conditioned != conditioned:
            endpoint = "/v1/predict_conditioned" if model.spec.conditioned else "/v1/predict"
            raise SpecIncompatible(f"model {model_id!r} serves {endpoint}")
        return model


def _grid(name: str, rows, n_steps: int | None = None) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise BadScenario(f"{name} must be a list of [x, y] pairs", name)
    if n_steps is not None and arr.shape[0] != n_steps:
        raise BadScenario(f"{name} must have {n_steps} steps, got {arr.shape[0]}", name)
    if not np.all(np.isfinite(arr)):
        raise BadScenario(f"{name} contains non-finite coordinates", name)
    if (np.abs(arr[:, 0]) > PITCH_HALF_X + PITCH_SLACK_M).any() or \
       (np.abs(arr[:, 1]) > PITCH_HALF_Y + PITCH_SLACK_M).any():
        raise BadScenario(f"{name} has coordinates outside the pitch (+{PITCH_SLACK_M}m slack)",
                          name)
    return arr


def _scenario_to_scene(req: ScenarioRequest, spec: ModelSpec,
                       frame_rate_hz: float) -> tuple[SceneInput, int]:
    if req.units != "m":
        raise BadScenario(f"units must be 'm', got {req.units!r}", "units")
    if not math.isclose(req.frame_rate_hz, frame_rate_hz):
        raise SpecIncompatible(
            f"service runs at {frame_rate_hz} Hz, request says {req.frame_rate_hz}")
    horizon = req.horizon if req.horizon is not None else spec.horizon
    if horizon < 1:
        raise BadScenario("horizon must be >= 1", "horizon")
    if horizon > spec.horizon:
        raise SpecIncompatible(
            f"requested horizon {horizon} exceeds the trained horizon {spec.horizon}")
    need = spec.window_len if spec.conditioned else spec.input_len
    ball = _grid("ball", req.ball)
    if ball.shape[0] != need:
        raise SpecIncompatible(
            f"ball trajectory must have {need} steps for this model, got {ball.shape[0]}")
    attackers = np.stack([_grid(f"attackers[{i}]", a) for i, a in enumerate(req.attackers)])
    if attackers.shape[1] != need:
        raise SpecIncompatible(
            f"attacker trajectories must have {need} steps, got {attackers.shape[1]}")
    defenders = np.stack(
        [_grid(f"defenders_past[{i}]", d, spec.input_len)
         for i, d in enumerate(req.defenders_past)])
    return SceneInput(ball=ball, attackers=attackers, defenders=defenders), horizon


_GROUPS = ["ball"] + ["home"] * 11 + ["away"] * 11
_ROLES = [0] + list(range(11)) * 2


def _prediction_payload(model_id: str, model, scene: SceneInput, horizon: int,
                        frame_rate_hz: float) -> dict:
    result = predict(scene, model)
    agents = []
    for row, agent_idx in enumerate(result.agent_indices):
        traj = result.dense[row, :horizon]
        controls = None
        if result.tracks is not None:
            controls = [
                {"offset": off, "position": [float(p[0]), float(p[1])]}
                for off, p in result.tracks[row].controls if off <= horizon
            ]
        agents.append({
            "group": _GROUPS[agent_idx],
            "role": _ROLES[agent_idx],
            "trajectory": [[float(x), float(y)] for x, y in traj],
            "controls": controls,
        })
    return {
        "model_id": model_id,
        "units": "m",
        "frame_rate_hz": frame_rate_hz,
        "horizon": horizon,
        "agents": agents,
    }


def create_app(models: dict[str, Any], frame_rate_hz: float = 10.0,
               frontend_dir: str | Path | None = None) -> FastAPI:
    registry = ModelRegistry(models, frame_rate_hz)
    app = FastAPI(title="playcast prediction service", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        details = [{"field": ".".join(str(p) for p in e["loc"] if p != "body"),
                    "message": e["msg"]} for e in exc.errors()]
        return JSONResponse(status_code=400, content={"error": "malformed request",
                                                      "details": details})

    @app.exception_handler(BadScenario)
    async def bad_scenario(request: Request, exc: BadScenario):
        return JSONResponse(status_code=400, content={
            "error": "malformed request",
            "details": [{"field": exc.field, "message": exc.message}]})

    @app.exception_handler(SpecIncompatible)
    async def incompatible(request: Request, exc: SpecIncompatible):
        return JSONResponse(status_code=422, content={"error": "model incompatibility",
                                                      "details": [{"message": exc.message}]})

    @app.exception_handler(Exception)
    async def internal(request: Request, exc: Exception):
        # never leak internals
        return JSONResponse(status_code=500, content={"error": "internal server error"})

    @app.get("/v1/models")
    def list_models():
        return {"models": [
            {"id": mid, "spec": m.spec.to_dict(), "frame_rate_hz": registry.frame_rate_hz}
            for mid, m in sorted(registry.models.items())
        ]}

    def _serve(req: ScenarioRequest, conditioned: bool):
        model = registry.get(req.model_id, conditioned)
        model_id = req.model_id or next(
            mid for mid, m in registry.models.items() if m is model)
        scene, horizon = _scenario_to_scene(req, model.spec, registry.frame_rate_hz)
        return _prediction_payload(model_id, model, scene, horizon, registry.frame_rate_hz)

    @app.post("/v1/predict")
    def predict_standard(req: ScenarioRequest):
        return _serve(req, conditioned=False)

    @app.post("/v1/predict_conditioned")
    def predict_conditioned(req: ScenarioRequest):
        return _serve(req, conditioned=True)

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")
    return app


def load_models(checkpoints: list[tuple[str | None, str | Path]]) -> dict[str, Any]:
    """Load (id, path) pairs; a None id falls back to the file stem."""
    out: dict[str, Any] = {}
    for model_id, path in checkpoints:
        model, meta = load_model(path)
        mid = model_id or Path(path).stem
        if mid in out:
            raise ValueError(f"duplicate model id {mid!r}")
        out[mid] = model
    return out
