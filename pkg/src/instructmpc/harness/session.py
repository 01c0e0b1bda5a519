"""Transport-free live session engine.

Wraps one episode runner with the interactive controls the console speaks:
instructions queued for the next step, pause/resume, speed changes within
protocol limits, and reset to a fresh seed. Inbound messages are applied
only at step boundaries. The engine records every applied instruction so a
batch replay can reproduce the session exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Optional

from ..sims.episode import EpisodeResult, EpisodeRunner, PresetSetup
from .config import RunConfig
from .experiment import build_setup
from .traces import write_trace

SPEED_MIN_HZ = 0.2
SPEED_MAX_HZ = 50.0


class SessionEngine:
    def __init__(self, config: RunConfig, out_dir: Optional[str] = None):
        self.config = config
        self.setup: PresetSetup = build_setup(config)
        self.variant = config.session.get("variant", "untuned")
        self.seed = config.seeds[0]
        self.pacing_hz = float(config.session.get("pacing_hz", 5.0))
        self.start_paused = bool(config.session.get("start_paused", False))
        self.paused = self.start_paused
        self.out_dir = Path(out_dir) if out_dir else None
        self._pending_instruction: Optional[str] = None
        self._runner = self._fresh_runner()
        self.result: Optional[EpisodeResult] = None

    def _fresh_runner(self) -> EpisodeRunner:
        base_overrides = {int(t): str(s) for t, s in self.config.instructions}
        return EpisodeRunner(self.setup, self.variant, self.seed, overrides=base_overrides)

    # -- control frames -------------------------------------------------
    def handle(self, message: dict) -> Optional[dict]:
        """Apply one client frame; returns an error frame for bad input."""
        kind = message.get("type")
        if kind == "instruction":
            text = message.get("text")
            if not isinstance(text, str) or not text.strip():
                return {"type": "error", "message": "instruction needs text"}
            # optional step target lets scripted clients pin the exact step;
            # without it the instruction lands on the next step executed
            target = message.get("t")
            if target is not None:
                if not isinstance(target, int) or target < self._runner.t:
                    return {
                        "type": "error",
                        "message": f"instruction step must be >= {self._runner.t}",
                    }
                self._runner.inject_instruction(target, text)
            else:
                self._pending_instruction = text
            return None
        if kind == "pause":
            self.paused = True
            return None
        if kind == "resume":
            self.paused = False
            return None
        if kind == "speed":
            hz = message.get("hz")
            if not isinstance(hz, (int, float)) or not (
                SPEED_MIN_HZ <= hz <= SPEED_MAX_HZ
            ):
                return {
                    "type": "error",
                    "message": f"speed must lie in [{SPEED_MIN_HZ}, {SPEED_MAX_HZ}] Hz",
                }
            self.pacing_hz = float(hz)
            return None
        if kind == "reset":
            seed = message.get("seed", self.seed)
            if not isinstance(seed, int):
                return {"type": "error", "message": "reset seed must be an integer"}
            self.seed = seed
            self._pending_instruction = None
            self.result = None
            self._runner = self._fresh_runner()
            self.paused = self.start_paused
            return None
        return {"type": "error", "message": f"unknown frame type {kind!r}"}

    # -- stepping --------------------------------------------------------
    @property
    def finished(self) -> bool:
        return self._runner.finished

    @property
    def t(self) -> int:
        return self._runner.t

    def tick(self) -> Optional[dict]:
        """Run one step unless paused or done; returns the tick frame."""
        if self.paused or self._runner.finished:
            return None
        if self._pending_instruction is not None:
            self._runner.inject_instruction(self._runner.t, self._pending_instruction)
            self._pending_instruction = None
        frame = self._runner.step()
        frame["type"] = "tick"
        return frame

    def finish(self) -> dict:
        """Finalize, persist the trace if configured, emit the done frame."""
        if self.result is None:
            self.result = self._runner.finalize()
        trace_path = None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            trace_path = self.out_dir / f"session_{self.variant}_{self.seed}.csv"
            write_trace(self.result, trace_path)
            log_path = self.out_dir / f"session_{self.variant}_{self.seed}_instructions.json"
            log_path.write_text(json.dumps(self.instruction_log(), indent=2))
        return {
            "type": "done",
            "cum_cost": float(self.result.trace.stage_costs.sum()),
            "cost": self.result.cost,
            "instruction_log": self.instruction_log(),
            "trace_path": str(trace_path) if trace_path else None,
        }

    def instruction_log(self) -> List[list]:
        return [[t, text] for t, text in self._runner.instruction_log]

    def replay_config(self) -> RunConfig:
        """Config that reproduces this session through the batch runner."""
        doc = self.config.__dict__.copy()
        doc = RunConfig(**doc)
        doc.seeds = [self.seed]
        doc.variants = [self.variant]
        doc.instructions = self.instruction_log()
        return doc
