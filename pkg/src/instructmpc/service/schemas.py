"""Request/response models for the service endpoints."""

from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str


class RiccatiRequest(BaseModel):
    A: List[List[float]]
    B: List[List[float]]
    Q: List[List[float]]
    R: List[List[float]]
    w_bound: float = 1.0
    tol: float = Field(default=1e-12, gt=0)
    max_iter: int = Field(default=100_000, ge=1)


class RiccatiResponse(BaseModel):
    P: List[List[float]]
    K: List[List[float]]
    F: List[List[float]]
    H: List[List[float]]
    rho_f: float
    norm_f: float
    residual: float
    iterations: int


class ExperimentRequest(BaseModel):
    config: dict
    out_dir: Optional[str] = None
    certify: bool = True


class ExperimentResponse(BaseModel):
    summary: dict


class HorizonRequest(BaseModel):
    rho: float = Field(gt=0, lt=1)
    T: int = Field(ge=2)


class HorizonResponse(BaseModel):
    k: int


class VerifyResponse(BaseModel):
    report: dict


class SessionInfo(BaseModel):
    scenario: str
    variant: str
    seed: int
    T: int
    k: int
    pacing_hz: float
    scenario_ids: List[str]
