"""Run configuration: TOML documents with a JSON-equivalent accepted.

Validation errors always name the offending key path. Serialization goes to
the JSON-safe canonical dict, so load(serialize(load(x))) is the identity.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(Exception):
    pass


SCENARIOS = ("robot", "energy", "theory", "custom")
L2D_MODELS = ("affine", "softmax", "external")
TUNER_KINDS = ("tailored-ogd", "dpo", "frozen")
VARIANTS = ("classic", "untuned", "tuned")

SCENARIO_DEFAULTS = {
    "robot": {"T": 240, "k": 5, "l2d": "softmax", "tuner": "dpo", "threshold": 240},
    "energy": {"T": 2400, "k": 12, "l2d": "softmax", "tuner": "dpo", "threshold": 500},
    "theory": {"T": 400, "k": 8, "l2d": "affine", "tuner": "tailored-ogd", "threshold": 240},
    "custom": {"T": 100, "k": 4, "l2d": "affine", "tuner": "frozen", "threshold": 240},
}


@dataclass
class RunConfig:
    scenario: str = "robot"
    t_len: int = 240
    k: Union[int, str] = 5                   # integer or "auto"
    seeds: List[int] = field(default_factory=lambda: [0])
    variants: List[str] = field(default_factory=lambda: list(VARIANTS))
    out_dir: Optional[str] = None
    l2d: Dict = field(default_factory=dict)
    tuner: Dict = field(default_factory=dict)
    scenario_options: Dict = field(default_factory=dict)
    session: Dict = field(default_factory=dict)
    custom: Dict = field(default_factory=dict)
    instructions: List = field(default_factory=list)   # [[t, text], ...]


def _expect(cond: bool, key: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"[{key}] {message}")


def _as_seed_list(raw, key: str) -> List[int]:
    if isinstance(raw, dict):
        count = raw.get("count")
        base = raw.get("base", 0)
        _expect(isinstance(count, int) and count > 0, key, "count must be positive")
        return [base + i for i in range(count)]
    _expect(isinstance(raw, list) and raw, key, "must be a nonempty list of seeds")
    _expect(all(isinstance(s, int) for s in raw), key, "seeds must be integers")
    return list(raw)


def load_config(source: Union[str, Path, dict]) -> RunConfig:
    """Parse and validate a config document (path to .toml/.json or a dict)."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"[path] config file {path} does not exist")
        data = path.read_bytes()
        if path.suffix.lower() == ".json":
            doc = json.loads(data)
        else:
            try:
                doc = tomllib.loads(data.decode("utf-8"))
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"[path] TOML parse error: {exc}") from exc
    else:
        doc = dict(source)

    run = dict(doc.get("run", doc))   # flat documents are accepted
    scenario = run.get("scenario", "robot")
    _expect(scenario in SCENARIOS, "run.scenario", f"must be one of {SCENARIOS}")
    defaults = SCENARIO_DEFAULTS[scenario]

    t_len = run.get("T", defaults["T"])
    _expect(isinstance(t_len, int) and t_len >= 2, "run.T", "must be an integer >= 2")

    k = run.get("k", defaults["k"])
    if k != "auto":
        _expect(isinstance(k, int) and k >= 1, "run.k", 'must be >= 1 or "auto"')

    seeds = _as_seed_list(run.get("seeds", [0]), "run.seeds")
    variants = list(run.get("variants", VARIANTS))
    for v in variants:
        _expect(v in VARIANTS, "run.variants", f"unknown variant '{v}'")

    l2d = dict(doc.get("l2d", {}))
    l2d.setdefault("model", defaults["l2d"])
    _expect(l2d["model"] in L2D_MODELS, "l2d.model", f"must be one of {L2D_MODELS}")
    if l2d["model"] == "external":
        _expect(bool(l2d.get("cmd")), "l2d.cmd", "external model needs a command")

    tuner = dict(doc.get("tuner", {}))
    tuner.setdefault("kind", defaults["tuner"])
    _expect(
        tuner["kind"] in TUNER_KINDS, "tuner.kind", f"must be one of {TUNER_KINDS}"
    )
    tuner.setdefault("projection", True)
    tuner.setdefault("threshold", defaults["threshold"])
    grad_bound = tuner.get("G", "estimate")
    if grad_bound != "estimate":
        _expect(
            isinstance(grad_bound, (int, float)) and grad_bound > 0,
            "tuner.G", 'must be positive or "estimate"',
        )
    diameter = tuner.get("D", 3.0)
    _expect(
        isinstance(diameter, (int, float)) and diameter > 0, "tuner.D", "must be positive"
    )
    tuner["D"] = float(diameter)
    tuner["G"] = grad_bound

    session = dict(doc.get("session", {}))
    pacing = session.setdefault("pacing_hz", 5.0)
    _expect(
        isinstance(pacing, (int, float)) and pacing >= 0,
        "session.pacing_hz", "must be >= 0 (0 means unpaced)",
    )

    custom = dict(doc.get("custom", {}))
    if scenario == "custom":
        for key in ("system", "library", "disturbance", "contexts"):
            _expect(key in custom, f"custom.{key}", "required for custom scenarios")

    instructions = []
    for item in doc.get("instructions", []):
        _expect(
            isinstance(item, (list, tuple)) and len(item) == 2,
            "instructions", "entries must be [t, text] pairs",
        )
        instructions.append([int(item[0]), str(item[1])])

    out_dir = run.get("out_dir")
    return RunConfig(
        scenario=scenario,
        t_len=t_len,
        k=k,
        seeds=seeds,
        variants=variants,
        out_dir=out_dir,
        l2d=l2d,
        tuner=tuner,
        scenario_options=dict(doc.get("scenario_options", {})),
        session=session,
        custom=custom,
        instructions=instructions,
    )


def serialize_config(config: RunConfig) -> dict:
    """Canonical JSON-safe document; load(serialize(cfg)) reproduces cfg."""
    doc = {
        "run": {
            "scenario": config.scenario,
            "T": config.t_len,
            "k": config.k,
            "seeds": config.seeds,
            "variants": config.variants,
        },
        "l2d": config.l2d,
        "tuner": config.tuner,
        "scenario_options": config.scenario_options,
        "session": config.session,
    }
    if config.out_dir:
        doc["run"]["out_dir"] = config.out_dir
    if config.custom:
        doc["custom"] = config.custom
    if config.instructions:
        doc["instructions"] = config.instructions
    return doc


def save_config(config: RunConfig, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(serialize_config(config), indent=2))
