import json

import pytest
from fastapi.testclient import TestClient

from instructmpc.harness.config import load_config
from instructmpc.service.app import create_app

GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0


def session_config(t_len=30, seed=3):
    return load_config(
        {
            "run": {"scenario": "robot", "T": t_len, "seeds": [seed],
                    "variants": ["untuned"]},
            "scenario_options": {"announce_direction": False},
            "session": {"variant": "untuned", "pacing_hz": 0.0},
        }
    )


@pytest.fixture
def client(tmp_path):
    app = create_app(session_config(), out_dir=str(tmp_path))
    with TestClient(app) as tc:
        yield tc


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_riccati_endpoint(client):
    body = client.post(
        "/riccati",
        json={"A": [[1.0]], "B": [[1.0]], "Q": [[1.0]], "R": [[1.0]]},
    ).json()
    assert body["P"][0][0] == pytest.approx(GOLDEN, abs=1e-10)
    assert body["rho_f"] < 1.0


def test_horizon_endpoint(client):
    body = client.post("/horizon", json={"rho": 0.5, "T": 1024}).json()
    assert body["k"] == 10


def test_session_info(client):
    body = client.get("/session/info").json()
    assert body["scenario"] == "robot"
    assert body["T"] == 30
    assert "track" in body["scenario_ids"]


def collect_until_done(ws, actions=None):
    """Drain frames, firing actions keyed by step index before that step."""
    actions = dict(actions or {})
    ticks = []
    next_t = 0
    while True:
        if next_t in actions:
            ws.send_text(json.dumps(actions.pop(next_t)))
        frame = json.loads(ws.receive_text())
        if frame["type"] == "tick":
            ticks.append(frame)
            next_t = frame["t"] + 1
        elif frame["type"] == "done":
            return ticks, frame
        elif frame["type"] == "error":
            raise AssertionError(frame)


def test_session_runs_to_completion(client):
    with client.websocket_connect("/session") as ws:
        ticks, done = collect_until_done(ws)
    assert [t["t"] for t in ticks] == list(range(30))
    assert done["instruction_log"] == []
    assert done["trace_path"]


def test_instruction_shifts_weights(tmp_path):
    config = session_config()
    config.session["start_paused"] = True
    app = create_app(config, out_dir=str(tmp_path))
    with TestClient(app) as tc:
        with tc.websocket_connect("/session") as ws:
            # paused start: both frames are applied before any step runs
            ws.send_text(json.dumps({
                "type": "instruction", "t": 5,
                "text": "strong northeast wind expected within 2 steps",
            }))
            ws.send_text(json.dumps({"type": "resume"}))
            ticks, done = collect_until_done(ws)
    tick5 = ticks[5]
    assert tick5["weights"]["gust_northeast"] > tick5["weights"]["track"]
    baseline = ticks[4]
    assert baseline["weights"]["track"] > baseline["weights"]["gust_northeast"]
    assert done["instruction_log"] == [[5, "strong northeast wind expected within 2 steps"]]


def test_bad_frames_return_errors_and_session_survives(client):
    with client.websocket_connect("/session") as ws:
        ws.send_text("not json at all")
        ws.send_text(json.dumps({"type": "mystery"}))
        ws.send_text(json.dumps({"type": "speed", "hz": 500.0}))
        errors, ticks = [], 0
        for _ in range(80):
            frame = json.loads(ws.receive_text())
            if frame["type"] == "error":
                errors.append(frame["message"])
            elif frame["type"] == "tick":
                ticks += 1
            if len(errors) == 3:
                break
        assert any("JSON" in e for e in errors)
        assert any("mystery" in e for e in errors)
        assert any("speed" in e for e in errors)


def test_reset_restarts_from_zero(tmp_path):
    app = create_app(session_config(t_len=10), out_dir=str(tmp_path))
    with TestClient(app) as tc:
        with tc.websocket_connect("/session") as ws:
            ticks, done = collect_until_done(ws)
            assert len(ticks) == 10
            ws.send_text(json.dumps({"type": "reset", "seed": 4}))
            ticks2, done2 = collect_until_done(ws)
    assert [t["t"] for t in ticks2] == list(range(10))
    assert ticks2[0]["cum_cost"] == ticks2[0]["stage_cost"]


def test_replayed_session_reproduces_trace(tmp_path):
    from instructmpc.harness.experiment import run_experiment
    from instructmpc.harness.session import SessionEngine
    from instructmpc.harness.traces import trace_file_digest

    config = session_config(t_len=25, seed=6)
    engine = SessionEngine(config, out_dir=str(tmp_path / "live"))
    engine.handle({"type": "instruction", "text": "strong southwest wind expected now"})
    while not engine.finished:
        engine.tick()
    done = engine.finish()
    replay_config = engine.replay_config()
    run_experiment(replay_config, out_dir=str(tmp_path / "replay"), certify=False)
    live = trace_file_digest(done["trace_path"])
    replayed = trace_file_digest(tmp_path / "replay" / "trace_untuned_6.csv")
    assert live == replayed
