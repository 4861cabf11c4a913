"""Request and response bodies for the HTTP service."""
from __future__ import annotations

from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field

Cell = Union[int, float, str, None]


class AccuracyRequest(BaseModel):
    suite: str = "vgg-e-accuracy"
    algos: Tuple[str, ...] = ("direct-fp32", "f2x2", "f4x4", "fft")
    precision: Literal["fp32", "fp16"] = "fp32"
    seed: int = 0
    scale: float = Field(default=1.0, gt=0.0, le=1.0)


class BenchRequest(BaseModel):
    suite: str = "vgg-e"
    algo: str = "f2x2"
    batch: int = Field(default=1, ge=1)
    repeats: int = Field(default=3, ge=1)
    scale: float = Field(default=1.0, gt=0.0, le=1.0)
    seed: int = 0


class GenRequest(BaseModel):
    m: int = Field(ge=1)
    r: int = Field(ge=1)
    points: Optional[List[str]] = None


class ReportResponse(BaseModel):
    """A tabular report in three equivalent forms.

    rows/columns are the structured data; csv and text are pre-rendered so
    thin clients never need to re-implement the formatting rules.
    """

    columns: List[str]
    rows: List[List[Cell]]
    seed: Optional[int] = None
    csv: str
    text: str


class GenResponse(BaseModel):
    text: str
    verified: bool
    max_magnitude: str
    mu_1d: int
    mu_2d: int


class HealthResponse(BaseModel):
    status: str
    version: str
