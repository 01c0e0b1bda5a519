"""Client for external predictor processes.

The predictor is a child process speaking newline-delimited JSON on its
standard streams:

    {"type": "hello", "version": 1, "scenarios": [...], "horizon": k}
        -> {"type": "ready", "model": "..."}
    {"type": "predict", "t": int, "context": str, "horizon": int}
        -> {"type": "weights", "t": int, "p": {id: weight, ...}}
    {"type": "feedback", "items": [{"context", "winner", "loser"}, ...]}
        -> {"type": "ack"}
    {"type": "update"} -> {"type": "updated", "loss_before": x, "loss_after": y}
    {"type": "shutdown"} -> process exits 0

Exactly one request is in flight at a time; callers are serialized by an
internal lock. Every response is validated before use.
"""

from __future__ import annotations

import json
import queue
import shlex
import subprocess
import threading
from typing import List, Optional, Sequence

import numpy as np

PROTOCOL_VERSION = 1
SIMPLEX_TOL = 1e-6


class AdapterError(Exception):
    """Base class for external-predictor failures."""


class AdapterProcessError(AdapterError):
    """The child process could not be started or died unexpectedly."""


class AdapterTimeoutError(AdapterError):
    """No response arrived within the configured timeout."""


class AdapterProtocolError(AdapterError):
    """Malformed or out-of-contract message from the predictor."""


class AdapterWeightsError(AdapterError):
    """Returned weights are not a simplex over the known scenario ids."""


class ExternalPredictorClient:
    def __init__(
        self,
        cmd: str,
        scenario_ids: Sequence[str],
        horizon: int,
        timeout: float = 10.0,
    ):
        self.scenario_ids = list(scenario_ids)
        self.horizon = int(horizon)
        self.timeout = float(timeout)
        self.model_name: Optional[str] = None
        self._lock = threading.Lock()
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                shlex.split(cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AdapterProcessError(f"could not start predictor: {exc}") from exc
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self) -> None:
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _send(self, message: dict) -> None:
        if self._proc.poll() is not None:
            raise AdapterProcessError("predictor process has exited")
        assert self._proc.stdin is not None
        try:
            self._proc.stdin.write(json.dumps(message) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterProcessError(f"pipe to predictor broke: {exc}") from exc

    def _recv(self) -> dict:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise AdapterTimeoutError(
                f"no response within {self.timeout}s"
            ) from None
        if line is None:
            raise AdapterProcessError("predictor closed its output stream")
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AdapterProtocolError(f"response is not JSON: {line!r}") from exc
        if not isinstance(msg, dict) or "type" not in msg:
            raise AdapterProtocolError(f"response lacks a type: {msg!r}")
        if msg["type"] == "error":
            raise AdapterProtocolError(f"predictor error: {msg.get('message')}")
        return msg

    def _exchange(self, message: dict, expect: str) -> dict:
        with self._lock:
            self._send(message)
            reply = self._recv()
        if reply["type"] != expect:
            raise AdapterProtocolError(
                f"expected '{expect}' frame, got '{reply['type']}'"
            )
        return reply

    def handshake(self) -> str:
        reply = self._exchange(
            {
                "type": "hello",
                "version": PROTOCOL_VERSION,
                "scenarios": self.scenario_ids,
                "horizon": self.horizon,
            },
            "ready",
        )
        self.model_name = str(reply.get("model", ""))
        return self.model_name

    def predict(self, t: int, context: str, horizon: Optional[int] = None) -> np.ndarray:
        """Scenario weights for a context, validated as a simplex."""
        reply = self._exchange(
            {
                "type": "predict",
                "t": int(t),
                "context": context,
                "horizon": int(horizon if horizon is not None else self.horizon),
            },
            "weights",
        )
        table = reply.get("p")
        if not isinstance(table, dict):
            raise AdapterProtocolError("weights frame lacks a 'p' table")
        unknown = set(table) - set(self.scenario_ids)
        if unknown:
            raise AdapterWeightsError(f"unknown scenario ids {sorted(unknown)}")
        weights = np.array(
            [float(table.get(sid, 0.0)) for sid in self.scenario_ids]
        )
        if (weights < -SIMPLEX_TOL).any() or abs(weights.sum() - 1.0) > SIMPLEX_TOL:
            raise AdapterWeightsError(
                f"weights are not a simplex (sum {weights.sum():.8f})"
            )
        return np.clip(weights, 0.0, None)

    def feedback(self, items: List[dict]) -> None:
        self._exchange({"type": "feedback", "items": items}, "ack")

    def update(self) -> tuple:
        reply = self._exchange({"type": "update"}, "updated")
        return float(reply["loss_before"]), float(reply["loss_after"])

    def shutdown(self, grace: float = 5.0) -> int:
        with self._lock:
            try:
                self._send({"type": "shutdown"})
            except AdapterProcessError:
                pass
            try:
                return self._proc.wait(timeout=grace)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                return self._proc.wait()

    def __enter__(self) -> "ExternalPredictorClient":
        self.handshake()
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()
