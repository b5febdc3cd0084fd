"""Pydantic models for the files the CLI reads and writes."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.curves import CentroaffineCurve
from src.errors import ConsistencyError, DomainError
from src.polygons import CentroaffinePolygon, SymmetricPolygon


class CurveDocument(BaseModel):
    """Sampled curve; closed curves are on the grid t_j = 2πj/N."""

    model_config = ConfigDict(populate_by_name=True)

    size: int = Field(..., alias="N", description="Number of samples")
    closed: bool = Field(True, description="Whether the curve is π-anti-periodic and closed")
    samples: list[list[float]] = Field(..., description="Points [x, y]")
    t0: float = Field(0.0, description="Parameter of the first sample")
    dt: float = Field(0.0, description="Parameter step")

    @model_validator(mode="after")
    def _shape(self) -> "CurveDocument":
        if len(self.samples) != self.size:
            raise ValueError(f"expected {self.size} samples, got {len(self.samples)}")
        if any(len(point) != 2 for point in self.samples):
            raise ValueError("every sample must be a pair [x, y]")
        return self

    @classmethod
    def from_curve(cls, curve: CentroaffineCurve) -> "CurveDocument":
        return cls(
            size=curve.size,
            closed=curve.closed,
            samples=curve.samples.tolist(),
            t0=curve.t0,
            dt=curve.dt,
        )

    def to_curve(self) -> CentroaffineCurve:
        return CentroaffineCurve(
            samples=np.array(self.samples, dtype=float),
            closed=self.closed,
            t0=self.t0,
            dt=self.dt,
        )


class PolygonDocument(BaseModel):
    """Origin-symmetric 2n-gon."""

    n: int = Field(..., ge=2, description="Half the number of vertices")
    vertices: list[list[float]] = Field(..., description="All 2n vertices [x, y]")

    @model_validator(mode="after")
    def _shape(self) -> "PolygonDocument":
        if len(self.vertices) != 2 * self.n:
            raise ValueError(f"expected {2 * self.n} vertices, got {len(self.vertices)}")
        if any(len(point) != 2 for point in self.vertices):
            raise ValueError("every vertex must be a pair [x, y]")
        return self

    @classmethod
    def from_polygon(cls, polygon: SymmetricPolygon) -> "PolygonDocument":
        return cls(n=polygon.n, vertices=polygon.vertices.tolist())

    def to_polygon(self) -> SymmetricPolygon:
        """A CentroaffinePolygon when the side determinants are 1, else a SymmetricPolygon."""
        vertices = np.array(self.vertices, dtype=float)
        try:
            return CentroaffinePolygon(vertices)
        except (ConsistencyError, DomainError):
            return SymmetricPolygon(vertices)


class PotentialDocument(BaseModel):
    """π-periodic potential sampled on t_j = πj/M."""

    samples: list[float] = Field(..., min_length=8, description="Values of p over [0, π)")


class AngleRecord(BaseModel):
    alpha: float = Field(..., description="Rotation number")
    c: float = Field(..., description="Relation constant [γ(t), γ(t+α)]")
    residual: float = Field(..., description="Max deviation of the determinant from c")


class RigidityDocument(BaseModel):
    n: int
    k: int
    eigenvalues: list[list[float]] = Field(..., description="Circulant eigenvalues [re, im]")
    kernel_indices: list[int]
    criterion_indices: list[int]
    arithmetic_indices: list[int]
    kernel_dim: int
    nontrivial: bool


class DeformationStepRecord(BaseModel):
    s: float
    nome: float
    alphas: list[float]
    curve_file: str | None = None


class DeformationDocument(BaseModel):
    k: int
    steps: list[DeformationStepRecord]
    limits: list[float] = Field(..., description="s → 0 extrapolations of each branch")
    infinitesimal: list[float] = Field(..., description="Roots of tan(kα) = k tan α")


class MonodromyDocument(BaseModel):
    matrix: list[list[float]]
    trace: float
    angle: float
    shift_time: float
    reduced_period: float | None
    fit_residual: float
    section: dict[str, Any] = Field(default_factory=dict)


class RunManifest(BaseModel):
    """Record of one CLI run; carries no timestamps so reruns are byte-identical."""

    command: str = Field(..., description="Subcommand path, such as 'lame build'")
    parameters: dict[str, Any] = Field(default_factory=dict)
    config: dict[str, Any] = Field(default_factory=dict)
    versions: dict[str, str] = Field(default_factory=dict)
    residuals: dict[str, float] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)
