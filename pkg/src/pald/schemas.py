"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class BuildRequest(BaseModel):
    points: Optional[list[list[float]]] = None
    distances: Optional[list[list[float]]] = None
    labels: Optional[list[str]] = None
    metric: str = "euclidean"
    tolerance: float = 0.0


class CacheSummary(BaseModel):
    cache_id: str
    n: int
    tau: float
    has_labels: bool
    metric: str


class QueryRequest(BaseModel):
    point: Optional[list[float]] = None
    distances: Optional[list[float]] = None


class QueryResponse(BaseModel):
    cohesion_to: list[float]
    cohesion_from: list[float]
    self_cohesion: float
    epsilon: float
    tau_updated: float
    strong_neighbors: list[int]
    is_outlier: bool


class ClassifyRequest(QueryRequest):
    method: str = "count_to"


class ClassifyResponse(BaseModel):
    per_class: dict[str, float]
    method: str
    predicted: str
    tie: bool


class AnomalyResponse(BaseModel):
    raw: float
    rank_score: float


class ClustersResponse(BaseModel):
    threshold: float
    clusters: list[list[int]]


class ErrorResponse(BaseModel):
    detail: str = Field(description="one-line error message")
