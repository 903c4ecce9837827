"""Request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..arrivals import ArrivalSpec

Distribution = Literal[
    "constant", "exponential", "bernoulli-scaled", "uniform", "custom-empirical"
]
Scheme = Literal["sat", "bet"]


class ArrivalSpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    distribution: Distribution
    mean: float = Field(ge=0)
    p: Optional[float] = None
    half_width: Optional[float] = None
    values: Optional[list[float]] = None

    def to_spec(self) -> ArrivalSpec:
        if self.distribution == "custom-empirical":
            return ArrivalSpec.custom_empirical(self.values or ())
        return ArrivalSpec(
            distribution=self.distribution,
            mean=self.mean,
            p=self.p,
            half_width=self.half_width,
        )


class HealthResponse(BaseModel):
    status: str
    version: str


class CapacityResponse(BaseModel):
    p: float
    capacity_bits: float


class AllocateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p_in: list[float] = Field(min_length=1)
    slot_duration: float = Field(default=1.0, gt=0)


class AllocationRow(BaseModel):
    slot: int
    p_in: float
    p_tr: float
    cum_in: float
    cum_tr: float
    rate_bits: float


class AllocateResponse(BaseModel):
    powers: list[float]
    breakpoints: list[int]
    t_lb: float
    t_opt: float
    t_ub: float
    rows: list[AllocationRow]


class TraceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: ArrivalSpecModel
    n: int = Field(ge=1)
    seed: int = 0


class TraceResponse(BaseModel):
    n: int
    seed: int
    mean: float
    energies: list[float]


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scheme: Scheme
    n: int = Field(ge=1)
    p: float = Field(ge=0)
    m: int = Field(default=16, ge=1)
    eps: Optional[float] = None
    h: Optional[int] = Field(default=None, ge=0)
    trials: int = Field(default=100, ge=1)
    seed: int = 0
    noise_variance: float = Field(default=1.0, ge=0)
    arrival: Optional[ArrivalSpecModel] = None


class OutcomeRow(BaseModel):
    trial: int
    scheme: Scheme
    n: int
    h: int
    P: float
    var: float
    msg: int
    decoded: int
    error: bool
    infeasible_count: int
    first_violation: Optional[int]


class SimulateResponse(BaseModel):
    scheme: Scheme
    n: int
    h: int
    m: int
    p: float
    var: float
    noise_variance: float
    trials: int
    decode_error_rate: float
    infeasible_symbol_fraction: float
    violation_rate: Optional[float]
    second_half_infeasible_rate: Optional[float]
    achieved_rate_mean: float
    outcomes: list[OutcomeRow]


class Fig5SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    l_slots: int = Field(default=20, ge=1)
    mean: float = Field(ge=0)
    std_values: list[float]
    trials: int = Field(ge=1)
    base_seed: int = 0
    family: Literal["bernoulli-scaled", "uniform"] = "bernoulli-scaled"


class SweepPointModel(BaseModel):
    std: float
    trials: int
    t_lb_mean: float
    t_lb_se: float
    t_opt_mean: float
    t_opt_se: float
    t_ub_mean: float
    t_ub_se: float


class Fig5SweepResponse(BaseModel):
    points: list[SweepPointModel]
    meta: dict


class FeasibilityTrendRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scheme: Scheme
    p: float = Field(ge=0)
    n_values: list[int] = Field(min_length=1)
    trials: int = Field(ge=1)
    base_seed: int = 0
    eps: Optional[float] = None


class FeasibilityRow(BaseModel):
    scheme: Scheme
    n: int
    trials: int
    violation_rate: float


class FeasibilityTrendResponse(BaseModel):
    points: list[FeasibilityRow]
    meta: dict
