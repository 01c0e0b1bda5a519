import json
import sys
from pathlib import Path

import numpy as np
import pytest

from instructmpc.harness.transcripts import adapter_conformance, default_transcript
from instructmpc.l2d import (
    AdapterProtocolError,
    AdapterTimeoutError,
    AdapterWeightsError,
    ExternalPredictorClient,
)

FAKE = f"{sys.executable} {Path(__file__).parent / 'fake_adapter.py'}"
IDS = ["track", "still", "gust_northeast", "gust_southwest"]
FIXTURE = Path(__file__).parent / "fixtures" / "client_requests.jsonl"


def test_uniform_echo_round_trip():
    with ExternalPredictorClient(FAKE, IDS, horizon=5) as client:
        assert client.model_name == "fake-adapter"
        weights = client.predict(0, "conditions calm")
        assert np.allclose(weights, 0.25)
        client.feedback([{"context": "c", "winner": IDS[0], "loser": IDS[1]}])
        before, after = client.update()
        assert before == pytest.approx(0.6931)


def test_request_bytes_match_committed_fixture(tmp_path):
    record = tmp_path / "seen.jsonl"
    client = ExternalPredictorClient(f"{FAKE} --record {record}", IDS, horizon=5)
    try:
        client.handshake()
        client.predict(3, "strong northeast wind expected within 2 steps")
        client.feedback([{"context": "c", "winner": IDS[0], "loser": IDS[1]}])
        client.update()
    finally:
        client.shutdown()
    assert record.read_bytes() == FIXTURE.read_bytes()


def test_non_simplex_rejected():
    with pytest.raises(AdapterWeightsError):
        with ExternalPredictorClient(f"{FAKE} --non-simplex", IDS, horizon=3) as client:
            client.predict(0, "x")


def test_unknown_scenario_rejected():
    with pytest.raises(AdapterWeightsError):
        with ExternalPredictorClient(f"{FAKE} --unknown-id", IDS, horizon=3) as client:
            client.predict(0, "x")


def test_malformed_response():
    with pytest.raises(AdapterProtocolError):
        with ExternalPredictorClient(f"{FAKE} --malformed", IDS, horizon=3) as client:
            client.predict(0, "x")


def test_timeout():
    with pytest.raises(AdapterTimeoutError):
        with ExternalPredictorClient(
            f"{FAKE} --silent-predict", IDS, horizon=3, timeout=0.4
        ) as client:
            client.predict(0, "x")


def test_conformance_passes_on_good_adapter():
    report = adapter_conformance(FAKE)
    assert report.passed
    assert report.exit_code == 0


def test_conformance_flags_non_simplex():
    report = adapter_conformance(f"{FAKE} --non-simplex")
    assert not report.passed
    failures = [e for e in report.exchanges if not e.ok]
    assert failures and "sum" in failures[0].detail


def test_default_transcript_shape():
    steps = default_transcript()
    kinds = [s["send"]["type"] for s in steps]
    assert kinds == [
        "hello", "predict", "predict", "feedback", "update",
        "nonsense-frame", "shutdown",
    ]
