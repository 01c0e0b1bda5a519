"""Scenario library: named disturbance archetypes with trajectory banks.

A bank maps (t, length) to a (length, n) matrix deterministically. Three
kinds are supported: a constant row, a periodic table indexed by t, and a
procedural generator looked up in a registry by name. Rows whose norm
exceeds the library's disturbance bound are scaled back at evaluation time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np


class LibraryError(Exception):
    """Scenario library definition or lookup problem."""


# procedural banks: name -> factory(params, n) -> row_fn(t) -> (n,) array
_GENERATORS: Dict[str, Callable] = {}


def register_trajectory_generator(name: str, factory: Callable) -> None:
    _GENERATORS[name] = factory


def _clip_rows(rows: np.ndarray, bound: float) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1)
    over = norms > bound
    if over.any():
        rows = rows.copy()
        rows[over] *= (bound / norms[over])[:, None]
    return rows


@dataclass(frozen=True)
class Scenario:
    id: str
    label: str
    keywords: tuple
    row_fn: Callable[[int], np.ndarray]
    spec: dict


def _build_row_fn(traj: dict, n: int) -> Callable[[int], np.ndarray]:
    kind = traj.get("kind")
    if kind == "constant":
        value = np.asarray(traj["value"], dtype=float)
        if value.shape != (n,):
            raise LibraryError(f"constant value must have {n} entries")
        return lambda t: value
    if kind == "table":
        rows = np.asarray(traj["rows"], dtype=float)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise LibraryError(f"table rows must be (period, {n})")
        period = int(traj.get("period", rows.shape[0]))
        if period < 1 or period > rows.shape[0]:
            raise LibraryError("table period out of range")
        return lambda t: rows[t % period]
    if kind == "procedural":
        name = traj.get("name")
        if name not in _GENERATORS:
            raise LibraryError(f"unknown trajectory generator '{name}'")
        return _GENERATORS[name](traj.get("params", {}), n)
    raise LibraryError(f"unknown trajectory kind '{kind}'")


@dataclass
class ScenarioLibrary:
    """Immutable set of scenarios sharing a state dimension and norm bound."""

    n: int
    w_bound: float
    scenarios: List[Scenario]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise LibraryError("scenario ids must be unique")
        if not self.scenarios:
            raise LibraryError("library must contain at least one scenario")

    @property
    def count(self) -> int:
        return len(self.scenarios)

    @property
    def ids(self) -> List[str]:
        return [s.id for s in self.scenarios]

    def index_of(self, scenario_id: str) -> int:
        for i, s in enumerate(self.scenarios):
            if s.id == scenario_id:
                return i
        raise LibraryError(f"unknown scenario id '{scenario_id}'")

    def bank(self, index: int, t: int, length: int) -> np.ndarray:
        """(length, n) trajectory of one scenario starting at step t, clipped."""
        key = (index, t, length)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        fn = self.scenarios[index].row_fn
        rows = np.array([fn(t + j) for j in range(length)], dtype=float)
        rows = _clip_rows(rows.reshape(length, self.n), self.w_bound)
        rows.setflags(write=False)
        self._cache[key] = rows
        return rows

    def bank_stack(self, t: int, length: int) -> np.ndarray:
        """(count, length, n) stack of every scenario's bank at (t, length)."""
        return np.stack([self.bank(i, t, length) for i in range(self.count)])

    def all_keywords(self) -> List[str]:
        seen: List[str] = []
        for s in self.scenarios:
            for kw in s.keywords:
                if kw not in seen:
                    seen.append(kw)
        return seen


def load_library(
    source: Union[str, Path, dict], w_bound: Optional[float] = None
) -> ScenarioLibrary:
    """Build a library from a JSON document (path or already-parsed dict).

    Document shape: {"n": int, "w_bound": real (optional if given as arg),
    "scenarios": [{"id", "label", "keywords": [...], "trajectory": {...}}]}.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    try:
        n = int(doc["n"])
        entries = doc["scenarios"]
    except (KeyError, TypeError) as exc:
        raise LibraryError(f"library document missing field: {exc}") from exc
    bound = w_bound if w_bound is not None else doc.get("w_bound")
    if bound is None or not bound > 0:
        raise LibraryError("a positive w_bound is required")
    scenarios = []
    for entry in entries:
        try:
            scenarios.append(
                Scenario(
                    id=str(entry["id"]),
                    label=str(entry.get("label", entry["id"])),
                    keywords=tuple(entry.get("keywords", [])),
                    row_fn=_build_row_fn(entry["trajectory"], n),
                    spec=dict(entry),
                )
            )
        except KeyError as exc:
            raise LibraryError(f"scenario entry missing field {exc}") from exc
    return ScenarioLibrary(n=n, w_bound=float(bound), scenarios=scenarios)
