"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class ErrorBody(BaseModel):
    code: int
    message: str


class MetaResponse(BaseModel):
    task: str
    labels: list[str]
    splits: dict[str, int]
    model_id: str | None
    model_kind: str | None
    artifact_version: str
    seed: int


class SplitsResponse(BaseModel):
    splits: dict[str, int]


class InstanceRow(BaseModel):
    id: str
    text: str
    gold: str | float | None
    predicted: str | float | None
    correct: bool | None


class InstancesPage(BaseModel):
    split: str
    total: int
    offset: int
    limit: int
    instances: list[InstanceRow]


class PredictRequest(BaseModel):
    texts: list[str] = Field(min_length=1)


class PredictResponse(BaseModel):
    texts: list[str]
    outputs: list  # rows (classification) or scalars (regression)
    labels: list[str]


class ExplainRequest(BaseModel):
    method: str
    instance_id: str | None = None
    text: str | None = None
    target_label: str | None = None
    params: dict = Field(default_factory=dict)
    seed: int = 0


class SuiteRunRequest(BaseModel):
    suite: list[dict] = Field(min_length=1)
    seed: int = 0


class DigestibleResponse(BaseModel):
    kind: str
    payload: dict
    provenance: dict


class DigestibleListResponse(BaseModel):
    digestibles: list[DigestibleResponse]
