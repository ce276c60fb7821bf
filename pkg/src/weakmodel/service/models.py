"""Request and response bodies."""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field


class RunOptions(BaseModel):
    """Command-line style overrides applied on top of the descriptor."""

    model_config = ConfigDict(extra="forbid")

    n: Optional[float] = Field(None, gt=0)
    mode: Optional[Literal["TRUNCATED", "SIEVE"]] = None
    freq_bound: Optional[float] = Field(None, ge=0)
    wraparound: Optional[bool] = None
    probes: Optional[list[float]] = None
    lags: Optional[list[float]] = None


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    descriptor: str = Field(..., description="descriptor document (YAML text)")
    options: RunOptions = RunOptions()


class FieldError(BaseModel):
    field: str
    message: str
    line: Optional[int] = None


class VerdictRow(BaseModel):
    n: float
    kind: str
    label: str
    empirical_re: float
    empirical_im: float
    theoretical_re: float
    theoretical_im: float
    abs_error: float
    tolerance: float
    passed: bool


class VerdictTable(BaseModel):
    summary: dict[str, Any]
    rows: list[VerdictRow]
    tolerances: list[float]
    passed: bool


class SpectrumRow(BaseModel):
    chi_num: Optional[int] = None
    chi_den: Optional[int] = None
    chi_real: Optional[float] = None
    eta: Union[list[int], float]
    intensity: float
    fb_re: float
    fb_im: float
    klass: str


class SpectrumTable(BaseModel):
    summary: dict[str, Any]
    rows: list[SpectrumRow]
    total_intensity: float
    window_measure: float
    tail_estimate: Optional[float] = None
    notes: list[str] = []


class Sample(BaseModel):
    n: float
    count: int
    lines: list[str]


class GenerateResponse(BaseModel):
    summary: dict[str, Any]
    samples: list[Sample]


class ValidateResponse(BaseModel):
    ok: bool
    summary: dict[str, Any]


class PeriodsResponse(BaseModel):
    summary: dict[str, Any]
    periods: dict[str, Any]
