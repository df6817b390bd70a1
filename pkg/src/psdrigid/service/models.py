"""Pydantic request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field

# symmetric 2x2 matrices travel as upper-triangle triples; entries are
# numbers or rational strings "num/den"
Scalar = float | int | str


class FactorizationModel(BaseModel):
    k: int = 2
    A: list[list[Scalar]]
    B: list[list[Scalar]]
    M: list[list[Scalar]] | None = None


class ClassifyRequest(BaseModel):
    factorization: FactorizationModel
    tolerance: float = Field(default=1e-9, gt=0)
    exact: bool = False


class ValidateRequest(BaseModel):
    factorization: FactorizationModel
    tolerance: float = Field(default=1e-9, gt=0)


class GenerateRequest(BaseModel):
    p: int = Field(ge=3)
    q: int = Field(ge=3)
    zero_pattern: list[tuple[int, int]] = Field(default_factory=list)
    count: int = Field(default=1, ge=0)
    seed: int
    tolerance: float = Field(default=1e-9, gt=0)


class OracleRequest(BaseModel):
    factorization: FactorizationModel
    s: int = Field(default=2, ge=1, le=2)
    trials: int = Field(default=10000, ge=0)
    seed: int
    tolerance: float = Field(default=1e-9, gt=0)


class RigidityResponse(BaseModel):
    one_inf_rigid: bool | str
    two_inf_rigid: bool
    locally_rigid: bool | str
    globally_rigid: bool | str
    zero_count: int
    preconditions_met: bool
    violations: list[str] | None = None
    witness_triple: list[list[int]] | None = None
    motion: list[list[float]] | None = None
    notes: list[str] | None = None
    tolerance: float


class ValidateResponse(BaseModel):
    valid: bool
    psd_failures: list[str]
    max_product_error: float
    tolerance: float


class GenerateResponse(BaseModel):
    instances: list[FactorizationModel]
    manifest: list[dict]


class BoundaryResponse(BaseModel):
    verdict: str
    evidence: str


class MotionsResponse(BaseModel):
    regime: str
    trivial_basis: list[list[list[float]]]
    orth_pairs: list[tuple[int, int]]
    cone_matrix: list[list[float]] | None = None
    row_labels: list[tuple[str, int]] | None = None
    right_kernel: list[list[float]] | None = None
    left_kernel_formula: list[float] | None = None
    left_kernel_minors: list[float] | None = None
    motion_space_kind: str
    motion_basis: list[list[list[float]]]
    witness_motion: list[list[float]] | None = None


class OracleResponse(BaseModel):
    found_nontrivial: bool
    motion: list[list[float]] | None = None
    trials_used: int
    seed: int


class HealthResponse(BaseModel):
    status: str
    version: str
