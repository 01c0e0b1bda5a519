"""Protocol conformance checks for external predictor processes.

A transcript is a list of exchanges: each sends one frame and checks the
response against an expectation where values must match exactly except for
"*" wildcards. The default transcript exercises the handshake, prediction
validity (simplex over known ids), feedback acknowledgement, the update
report, error handling for unknown frame types, and a clean shutdown.
"""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

SIMPLEX_TOL = 1e-6
DEFAULT_SCENARIOS = ("track", "still", "gust_northeast", "gust_southwest")


@dataclass
class ExchangeResult:
    sent: dict
    received: Optional[dict]
    ok: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    exchanges: List[ExchangeResult] = field(default_factory=list)
    exit_code: Optional[int] = None
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "exit_code": self.exit_code,
            "exchanges": [
                {
                    "sent": e.sent,
                    "received": e.received,
                    "ok": e.ok,
                    "detail": e.detail,
                }
                for e in self.exchanges
            ],
        }


def default_transcript(scenarios=DEFAULT_SCENARIOS, horizon: int = 5) -> list:
    ids = list(scenarios)
    return [
        {
            "send": {"type": "hello", "version": 1, "scenarios": ids, "horizon": horizon},
            "expect": {"type": "ready", "model": "*"},
        },
        {
            "send": {
                "type": "predict", "t": 0,
                "context": "conditions calm, tracking nominal", "horizon": horizon,
            },
            "expect": {"type": "weights", "t": 0, "p": "*simplex*"},
        },
        {
            "send": {
                "type": "predict", "t": 7,
                "context": "strong northeast wind expected within 2 steps",
                "horizon": horizon,
            },
            "expect": {"type": "weights", "t": 7, "p": "*simplex*"},
        },
        {
            "send": {
                "type": "feedback",
                "items": [
                    {
                        "context": "strong northeast wind expected within 2 steps",
                        "winner": ids[2],
                        "loser": ids[1],
                    }
                ],
            },
            "expect": {"type": "ack"},
        },
        {
            "send": {"type": "update"},
            "expect": {"type": "updated", "loss_before": "*", "loss_after": "*"},
        },
        {
            "send": {"type": "nonsense-frame"},
            "expect": {"type": "error", "message": "*"},
        },
        {"send": {"type": "shutdown"}, "expect_exit": 0},
    ]


def _check_simplex(table, ids) -> str:
    if not isinstance(table, dict):
        return "weights table is not an object"
    unknown = set(table) - set(ids)
    if unknown:
        return f"unknown scenario ids {sorted(unknown)}"
    values = np.array([float(table.get(sid, 0.0)) for sid in ids])
    if (values < -SIMPLEX_TOL).any():
        return "negative weight"
    if abs(values.sum() - 1.0) > SIMPLEX_TOL:
        return f"weights sum to {values.sum():.8f}"
    return ""


def _check_expect(received: dict, expect: dict, ids) -> str:
    for key, want in expect.items():
        if key not in received:
            return f"missing field '{key}'"
        got = received[key]
        if want == "*":
            continue
        if want == "*simplex*":
            problem = _check_simplex(got, ids)
            if problem:
                return problem
            continue
        if got != want:
            return f"field '{key}': expected {want!r}, got {got!r}"
    return ""


def adapter_conformance(
    cmd: str,
    transcript: Optional[list] = None,
    timeout: float = 10.0,
    scenarios=DEFAULT_SCENARIOS,
) -> ConformanceReport:
    """Drive a predictor process through a transcript and grade every reply."""
    steps = transcript if transcript is not None else default_transcript(scenarios)
    ids = list(scenarios)
    report = ConformanceReport()
    proc = subprocess.Popen(
        shlex.split(cmd), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
        text=True, bufsize=1,
    )
    try:
        import threading
        import queue

        lines: "queue.Queue[Optional[str]]" = queue.Queue()

        def pump():
            for line in proc.stdout:
                lines.put(line)
            lines.put(None)

        threading.Thread(target=pump, daemon=True).start()

        all_ok = True
        for step in steps:
            sent = step["send"]
            proc.stdin.write(json.dumps(sent) + "\n")
            proc.stdin.flush()
            if "expect_exit" in step:
                try:
                    code = proc.wait(timeout=timeout)
                except subprocess.TimeoutExpired:
                    proc.kill()
                    code = proc.wait()
                report.exit_code = code
                ok = code == step["expect_exit"]
                report.exchanges.append(
                    ExchangeResult(sent, None, ok, f"exit code {code}")
                )
                all_ok = all_ok and ok
                continue
            try:
                line = lines.get(timeout=timeout)
            except Exception:
                line = None
            if line is None:
                report.exchanges.append(
                    ExchangeResult(sent, None, False, "no response")
                )
                all_ok = False
                break
            try:
                received = json.loads(line)
            except json.JSONDecodeError:
                report.exchanges.append(
                    ExchangeResult(sent, None, False, f"not JSON: {line!r}")
                )
                all_ok = False
                continue
            problem = _check_expect(received, step["expect"], ids)
            report.exchanges.append(
                ExchangeResult(sent, received, problem == "", problem)
            )
            all_ok = all_ok and problem == ""
        report.passed = all_ok and report.exit_code == 0
    finally:
        if proc.poll() is None:
            proc.kill()
            proc.wait()
    return report


def agreement_check(
    cmd: str,
    weights_file: str,
    contexts: list,
    tol: float = 1e-9,
) -> dict:
    """Compare an adapter's predictions against the built-in softmax scorer
    initialized from the same weights file."""
    from ..l2d.adapter_client import ExternalPredictorClient
    from ..l2d.features import Vocabulary, featurize
    from ..l2d.models import SoftmaxScorer

    doc = json.loads(open(weights_file, "r", encoding="utf-8").read())
    ids = doc["scenarios"]
    vocab = Vocabulary(doc["vocabulary"])
    scorer = SoftmaxScorer(np.asarray(doc["matrix"], dtype=float))
    client = ExternalPredictorClient(
        f"{cmd} --weights {shlex.quote(weights_file)}", ids, horizon=5
    )
    worst = 0.0
    try:
        client.handshake()
        for t, text in enumerate(contexts):
            remote = client.predict(t, text)
            local = scorer.weights(featurize(text, vocab))
            worst = max(worst, float(np.abs(remote - local).max()))
    finally:
        client.shutdown()
    return {"max_abs_difference": worst, "passed": worst <= tol}
