"""Plant description and derived controller data.

All matrices are plain float64 numpy arrays. A ``SystemModel`` is validated
once at construction; a ``RiccatiSolution`` is immutable after the solve and
caches the decay transforms ``(F^T)^j P`` that every downstream formula
reuses.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import List

import numpy as np

SYMMETRY_TOL = 1e-12
R_MIN_EIG = 1e-9
Q_MIN_EIG = -1e-10


class ControlError(Exception):
    """Base class for control-layer failures."""


class DimensionError(ControlError):
    """Shapes of supplied matrices or vectors do not agree."""


class StabilizabilityError(ControlError):
    """(A, B) fails the numerical stabilizability test."""


class DareConvergenceError(ControlError):
    """Fixed-point Riccati iteration did not reach tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def _check_symmetric(mat: np.ndarray, name: str) -> None:
    if not np.allclose(mat, mat.T, atol=SYMMETRY_TOL, rtol=0.0):
        raise DimensionError(f"{name} must be symmetric within {SYMMETRY_TOL}")


def _is_stabilizable(a: np.ndarray, b: np.ndarray) -> bool:
    """PBH test: rank [A - lam*I, B] = n for every eigenvalue |lam| >= 1."""
    n = a.shape[0]
    for lam in np.linalg.eigvals(a):
        if abs(lam) >= 1.0 - 1e-10:
            pencil = np.hstack([a - lam * np.eye(n), b])
            if np.linalg.matrix_rank(pencil, tol=1e-10) < n:
                return False
    return True


@dataclass(frozen=True)
class SystemModel:
    """Linear plant x' = A x + B u + w with quadratic stage cost (Q, R).

    ``w_bound`` is the norm bound on the disturbance; it is carried here
    because forecast clipping and the performance bounds need it.
    """

    a: np.ndarray
    b: np.ndarray
    q: np.ndarray
    r: np.ndarray
    w_bound: float

    def __post_init__(self):
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        self.validate()

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    def validate(self) -> None:
        a, b, q, r = self.a, self.b, self.q, self.r
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"A must be square, got {a.shape}")
        n = a.shape[0]
        if b.ndim != 2 or b.shape[0] != n:
            raise DimensionError(f"B must be {n}xm, got {b.shape}")
        if q.shape != (n, n):
            raise DimensionError(f"Q must be {n}x{n}, got {q.shape}")
        m = b.shape[1]
        if r.shape != (m, m):
            raise DimensionError(f"R must be {m}x{m}, got {r.shape}")
        _check_symmetric(q, "Q")
        _check_symmetric(r, "R")
        if np.linalg.eigvalsh(r).min() < R_MIN_EIG:
            raise ControlError("R must be positive definite (min eig >= 1e-9)")
        q_min = np.linalg.eigvalsh(q).min()
        if q_min < Q_MIN_EIG:
            raise ControlError("Q must be positive semidefinite")
        if not self.w_bound > 0:
            raise ControlError("w_bound must be positive")
        if not _is_stabilizable(a, b):
            raise StabilizabilityError("(A, B) is not stabilizable")


@dataclass(frozen=True)
class RiccatiSolution:
    """Fixed point of the Riccati recursion and the gains derived from it.

    Fields: terminal/value matrix ``p``, feedback gain ``k_gain``, closed
    loop matrix ``f = A - B k_gain``, disturbance-response matrix
    ``h = B (R + B^T P B)^{-1} B^T``, plus the spectral radius and operator
    2-norm of ``f``. ``m_inv`` caches ``(R + B^T P B)^{-1}``.
    """

    model: SystemModel
    p: np.ndarray
    k_gain: np.ndarray
    f: np.ndarray
    h: np.ndarray
    m_inv: np.ndarray
    rho_f: float
    norm_f: float
    residual: float
    iterations: int
    # lazily grown cache of (F^T)^j @ P, guarded for concurrent readers
    _ftp_cache: List[np.ndarray] = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def ftp(self, j: int) -> np.ndarray:
        """(F^T)^j @ P by repeated multiplication, cached per solution."""
        cache = self._ftp_cache
        if j < len(cache):
            return cache[j]
        with self._lock:
            if not cache:
                cache.append(self.p.copy())
            ft = self.f.T
            while len(cache) <= j:
                cache.append(ft @ cache[-1])
        return cache[j]

    def gain_residuals(self) -> dict:
        """Reconstruction errors of K, F, H from P; all should be ~0."""
        msum = self.model.r + self.model.b.T @ self.p @ self.model.b
        k = np.linalg.solve(msum, self.model.b.T @ self.p @ self.model.a)
        f = self.model.a - self.model.b @ k
        h = self.model.b @ np.linalg.solve(msum, self.model.b.T)
        return {
            "k": float(np.linalg.norm(k - self.k_gain)),
            "f": float(np.linalg.norm(f - self.f)),
            "h": float(np.linalg.norm(h - self.h)),
        }


@dataclass
class EpisodeTrace:
    """Per-step record of a rolled-out episode.

    ``x`` has T+1 rows (terminal state included); ``windows[t]`` is the
    forecast matrix the controller saw at step t.
    """

    x: np.ndarray              # (T+1, n)
    u: np.ndarray              # (T, m)
    w: np.ndarray              # (T, n)
    windows: list              # T matrices, each (L_t, n)
    stage_costs: np.ndarray    # (T,)
    context_ids: list          # T strings
    k: int

    @property
    def horizon(self) -> int:
        return self.u.shape[0]

    def validate(self, model: SystemModel, tol: float = 1e-10) -> None:
        t_len = self.horizon
        if self.x.shape[0] != t_len + 1 or self.w.shape[0] != t_len:
            raise DimensionError("trace lengths are inconsistent")
        if len(self.windows) != t_len or len(self.context_ids) != t_len:
            raise DimensionError("trace lengths are inconsistent")
        recon = self.x[:-1] @ model.a.T + self.u @ model.b.T + self.w
        err = np.abs(recon - self.x[1:]).max()
        if err > tol:
            raise ControlError(f"transition residual {err:.3e} exceeds {tol}")
