"""FastAPI application: REST endpoints over the library plus the live
WebSocket session protocol the operator console speaks.

Every session frame is JSON text. Server to client: tick frames per control
step and one done frame at the end. Client to server: instruction, pause,
resume, speed and reset frames; all are applied at step boundaries only.
"""

from __future__ import annotations

import asyncio
import json
import logging
from typing import Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .. import __version__
from ..control import SystemModel, solve_dare
from ..analysis.bounds import select_horizon
from ..harness.config import ConfigError, RunConfig, load_config
from ..harness.experiment import run_experiment
from ..harness.session import SessionEngine
from ..harness.verify import verify_suite
from .schemas import (
    ExperimentRequest,
    ExperimentResponse,
    HealthResponse,
    HorizonRequest,
    HorizonResponse,
    RiccatiRequest,
    RiccatiResponse,
    SessionInfo,
    VerifyResponse,
)

logger = logging.getLogger(__name__)


def create_app(config: Optional[RunConfig] = None, out_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="instructmpc", version=__version__)
    app.state.config = config
    app.state.out_dir = out_dir

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(version=__version__)

    @app.post("/riccati", response_model=RiccatiResponse)
    def riccati(req: RiccatiRequest) -> RiccatiResponse:
        model = SystemModel(a=req.A, b=req.B, q=req.Q, r=req.R, w_bound=req.w_bound)
        sol = solve_dare(model, tol=req.tol, max_iter=req.max_iter)
        return RiccatiResponse(
            P=sol.p.tolist(), K=sol.k_gain.tolist(), F=sol.f.tolist(),
            H=sol.h.tolist(), rho_f=sol.rho_f, norm_f=sol.norm_f,
            residual=sol.residual, iterations=sol.iterations,
        )

    @app.post("/horizon", response_model=HorizonResponse)
    def horizon(req: HorizonRequest) -> HorizonResponse:
        return HorizonResponse(k=select_horizon(req.rho, req.T))

    @app.post("/experiments", response_model=ExperimentResponse)
    def experiments(req: ExperimentRequest) -> ExperimentResponse:
        config = load_config(req.config)
        summary = run_experiment(config, out_dir=req.out_dir, certify=req.certify)
        return ExperimentResponse(summary=summary)

    @app.get("/verify", response_model=VerifyResponse)
    def verify(filter: Optional[str] = None) -> VerifyResponse:
        return VerifyResponse(report=verify_suite(filter))

    @app.get("/session/info", response_model=SessionInfo)
    def session_info() -> SessionInfo:
        cfg = app.state.config
        if cfg is None:
            raise ConfigError("service started without a session config")
        engine = SessionEngine(cfg)
        return SessionInfo(
            scenario=cfg.scenario,
            variant=engine.variant,
            seed=engine.seed,
            T=cfg.t_len,
            k=engine.setup.k,
            pacing_hz=engine.pacing_hz,
            scenario_ids=engine.setup.lib.ids,
        )

    @app.websocket("/session")
    async def session(ws: WebSocket) -> None:
        await ws.accept()
        cfg = app.state.config
        if cfg is None:
            await ws.send_text(json.dumps(
                {"type": "error", "message": "service started without a session config"}
            ))
            await ws.close()
            return
        engine = SessionEngine(cfg, out_dir=app.state.out_dir)
        inbound: asyncio.Queue = asyncio.Queue()

        async def reader() -> None:
            try:
                while True:
                    inbound.put_nowait(await ws.receive_text())
            except WebSocketDisconnect:
                inbound.put_nowait(None)

        reader_task = asyncio.create_task(reader())
        try:
            done_sent = False
            while True:
                # apply queued client frames at the step boundary
                while not inbound.empty():
                    raw = inbound.get_nowait()
                    if raw is None:
                        return
                    try:
                        message = json.loads(raw)
                    except json.JSONDecodeError:
                        await ws.send_text(json.dumps(
                            {"type": "error", "message": "frame is not JSON"}
                        ))
                        continue
                    error = engine.handle(message)
                    if error is not None:
                        await ws.send_text(json.dumps(error))
                frame = engine.tick()
                if frame is not None:
                    await ws.send_text(json.dumps(frame))
                if engine.finished and not done_sent:
                    await ws.send_text(json.dumps(engine.finish()))
                    done_sent = True
                if engine.pacing_hz > 0:
                    await asyncio.sleep(1.0 / engine.pacing_hz)
                else:
                    await asyncio.sleep(0)
                if done_sent:
                    # keep serving control frames (reset restarts the loop)
                    raw = await inbound.get()
                    if raw is None:
                        return
                    try:
                        message = json.loads(raw)
                    except json.JSONDecodeError:
                        await ws.send_text(json.dumps(
                            {"type": "error", "message": "frame is not JSON"}
                        ))
                        continue
                    error = engine.handle(message)
                    if error is not None:
                        await ws.send_text(json.dumps(error))
                    done_sent = engine.finished
        except WebSocketDisconnect:
            pass
        finally:
            reader_task.cancel()

    return app
