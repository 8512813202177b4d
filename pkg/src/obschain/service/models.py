"""Pydantic request/response models of the HTTP service.

Every response carries the same envelope: a header echoing the request
parameters, the seed (when randomness is involved) and the package version,
plus a list of rows. The envelope is what the CLI writes to disk, so field
order and serialization must stay stable across releases for golden files.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator


class Header(BaseModel):
    params: dict[str, Any]
    seed: int | None = None
    version: str


class ClosedFormRequest(BaseModel):
    d: int = Field(default=2, ge=2)
    n_copies: int = Field(default=1, ge=1)
    observers: int = Field(default=1, ge=1)
    encoding: Literal[
        "single-copy", "symmetric-copies", "optimal-qubit", "copies-then-optimal"
    ] = "symmetric-copies"


class ClosedFormRow(BaseModel):
    k: int
    delta: float
    fidelity: float


class ClosedFormResponse(BaseModel):
    header: Header
    rows: list[ClosedFormRow]


class EgalitarianRequest(BaseModel):
    system: Literal["qudit", "ncopy"] = "qudit"
    d: int | None = Field(default=None, ge=2)
    n_copies: int | None = Field(default=None, ge=1)
    observers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_system_params(self) -> "EgalitarianRequest":
        if self.system == "qudit" and self.d is None:
            raise ValueError("qudit system requires d")
        if self.system == "ncopy" and self.n_copies is None:
            raise ValueError("ncopy system requires n_copies")
        return self


class ScheduleRow(BaseModel):
    k: int
    epsilon: float
    fidelity: float


class ScheduleResponse(BaseModel):
    header: Header
    rows: list[ScheduleRow]


class PrivilegedRequest(BaseModel):
    system: Literal["qudit", "ncopy"] = "qudit"
    d: int | None = Field(default=None, ge=2)
    n_copies: int | None = Field(default=None, ge=1)
    observers: int = Field(default=1, ge=1)
    epsilon: float | None = Field(default=None, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_system_params(self) -> "PrivilegedRequest":
        if self.system == "qudit" and self.d is None:
            raise ValueError("qudit system requires d")
        if self.system == "ncopy" and self.n_copies is None:
            raise ValueError("ncopy system requires n_copies")
        return self


class PrivilegedRow(BaseModel):
    epsilon: float
    delta: float
    fidelity: float


class PrivilegedResponse(BaseModel):
    header: Header
    rows: list[PrivilegedRow]


class SimulateRequest(BaseModel):
    system: Literal["qudit", "spin"] = "qudit"
    d: int | None = Field(default=None, ge=2)
    n_copies: int | None = Field(default=None, ge=1)
    observers: int = Field(default=1, ge=1)
    trials: int = Field(default=10_000, ge=1)
    seed: int = 0
    epsilon: float | None = Field(default=None, ge=0.0, le=1.0)
    strengths: list[float] | None = None
    schedule: Literal["egalitarian", "stochastic"] | None = None
    stochastic_realization: bool = False

    @model_validator(mode="after")
    def _check_strength_source(self) -> "SimulateRequest":
        given = sum(x is not None for x in (self.epsilon, self.strengths, self.schedule))
        if given != 1:
            raise ValueError("pass exactly one of epsilon, strengths, or schedule")
        if self.system == "qudit" and self.d is None:
            raise ValueError("qudit system requires d")
        if self.system == "spin" and self.n_copies is None:
            raise ValueError("spin system requires n_copies")
        if self.stochastic_realization and self.system != "spin":
            raise ValueError("stochastic_realization applies to the spin chain only")
        if self.schedule == "stochastic" and not self.stochastic_realization:
            raise ValueError("the stochastic schedule is only meaningful with stochastic_realization")
        return self


class SimulateRow(BaseModel):
    k: int
    epsilon: float
    mean: float
    stderr: float
    closed_form: float


class SimulateResponse(BaseModel):
    header: Header
    rows: list[SimulateRow]


class VerifyRequest(BaseModel):
    check: Literal["haar-moments", "channel-r", "bloch-shrink"]
    d: int = Field(default=2, ge=2)
    epsilon: float = Field(default=1.0, ge=0.0, le=1.0)
    samples: int = Field(default=100_000, ge=2)
    seed: int = 0


class VerifyRow(BaseModel):
    name: str
    value: float
    stderr: float | None = None
    target: float | None = None
    sigma_ratio: float | None = None


class VerifyResponse(BaseModel):
    header: Header
    rows: list[VerifyRow]


class Figure1Request(BaseModel):
    n_copies: int = Field(default=1000, ge=1)
    k_grid: str | list[int] = "log:1..1e6:25"


class Figure1Row(BaseModel):
    K: int
    delta_exact: float
    delta_asym_large_k: float
    delta_asym_large_n: float
    delta_stochastic: float


class Figure1Response(BaseModel):
    header: Header
    rows: list[Figure1Row]
