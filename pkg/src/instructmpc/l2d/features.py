"""Keyword featurization of instruction text.

Deterministic and dependency-free: a bag-of-keywords indicator over a fixed
vocabulary plus a constant bias slot, normalized to unit length. The bias
slot guarantees a nonzero vector for empty or all-unknown text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class Vocabulary:
    keywords: tuple

    def __init__(self, keywords: Sequence[str]):
        kws = tuple(k.lower() for k in keywords)
        if not kws:
            raise ValueError("vocabulary must be nonempty")
        if len(set(kws)) != len(kws):
            raise ValueError("vocabulary keywords must be unique")
        object.__setattr__(self, "keywords", kws)

    @property
    def dim(self) -> int:
        """Feature dimension: one slot per keyword plus the bias slot."""
        return len(self.keywords) + 1


@dataclass(frozen=True)
class ContextFeatures:
    phi: np.ndarray
    context_id: str


def tokenize(text: str) -> list:
    return _TOKEN_RE.findall(text.lower())


def featurize(text: str, vocab: Vocabulary) -> ContextFeatures:
    """Indicator vector over vocabulary keywords, bias slot last, unit norm.

    Unknown words are ignored; empty text yields the pure bias vector.
    """
    vec = np.zeros(vocab.dim)
    vec[-1] = 1.0
    tokens = set(tokenize(text))
    for i, kw in enumerate(vocab.keywords):
        if kw in tokens:
            vec[i] = 1.0
    vec /= np.linalg.norm(vec)
    return ContextFeatures(phi=vec, context_id=text)
