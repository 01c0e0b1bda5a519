"""Scripted context streams standing in for live operator instructions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple


@dataclass
class ContextStream:
    """Events fire ahead of their step: the event at t_fire supplies the
    context for every step in [t_fire - lead, t_fire]. Later events win when
    windows overlap. Steps not covered get the default text."""

    events: List[Tuple[int, str, str]]  # (t_fire, text, scenario hint)
    lead: int
    default_text: str

    def __post_init__(self):
        fires = [e[0] for e in self.events]
        if fires != sorted(fires):
            raise ValueError("events must be sorted by firing step")

    def expand(self, t_len: int) -> List[str]:
        texts = [self.default_text] * t_len
        for t_fire, text, _hint in self.events:
            for t in range(max(0, t_fire - self.lead), min(t_fire + 1, t_len)):
                texts[t] = text
        return texts
