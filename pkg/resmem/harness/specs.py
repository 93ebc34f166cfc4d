"""Sweep definitions and config-file loading."""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from resmem.core.config import settings

Driver = Literal["lorenz", "rossler", "narma", "noise", "none"]
Metric = Literal[
    "train_test",
    "memory_capacity",
    "memory_curve",
    "delay_capacity",
    "delay_trace",
    "norm_of_variation",
    "variation_curve",
    "nonlinear_index",
    "lyapunov",
    "path_length",
    "calibrated_rho",
    "delay_coefficients",
    "autocorrelation",
]
FitMode = Literal["all", "first"]


class SweepGrid(BaseModel):
    """Parameter lists; the sweep evaluates their Cartesian product."""

    model_config = ConfigDict(frozen=True)

    g: List[float] = Field(default=[1.0], min_length=1)
    epsilon: List[float] = Field(default=[1.0], min_length=1)
    eta_f: List[float] = Field(default=[1.0], min_length=1)
    d_e: List[int] = Field(default=[1], min_length=1)
    narma_order: List[int] = Field(default=[10], min_length=1)
    rho: List[float] = Field(default=[1.0], min_length=1)
    seeds: List[int] = Field(default_factory=lambda: list(settings.default_seeds), min_length=1)

    @field_validator("eta_f")
    @classmethod
    def _check_eta_f(cls, values: List[float]) -> List[float]:
        if any(not 0 < v <= 1 for v in values):
            raise ValueError("eta_f values must be in (0, 1]")
        return values

    @field_validator("d_e", "narma_order")
    @classmethod
    def _check_positive_ints(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError("values must be at least 1")
        return values

    @field_validator("rho")
    @classmethod
    def _check_rho(cls, values: List[float]) -> List[float]:
        if any(v <= 0 for v in values):
            raise ValueError("rho values must be positive")
        return values

    @property
    def size(self) -> int:
        return (
            len(self.g)
            * len(self.epsilon)
            * len(self.eta_f)
            * len(self.d_e)
            * len(self.narma_order)
            * len(self.rho)
            * len(self.seeds)
        )


class SweepSpec(BaseModel):
    """One named experiment: grid, driver, metrics and fixed run parameters."""

    model_config = ConfigDict(frozen=True)

    experiment: str = Field(min_length=1)
    description: str = ""
    grid: SweepGrid = Field(default_factory=SweepGrid)
    driver: Driver = "lorenz"
    metrics: List[Metric] = Field(min_length=1)

    M: int = Field(default=100, ge=2)
    node_type: Literal["tanh", "multidim"] = "tanh"
    delay_feedback: float = 0.5
    washout: int = Field(default=1000, ge=0)
    n_fit: int = Field(default=10000, ge=1)

    # when set, each adjacency is rescaled so its mean weighted path length hits this value
    target_LW: Optional[float] = None
    fit_modes: List[FitMode] = Field(default=["all"], min_length=1)
    tau_max: int = Field(default_factory=lambda: settings.tau_max, ge=1)
    variation_samples: int = Field(default=100, ge=1)
    n_probes: int = Field(default=100, ge=1)
    probe_length: int = Field(default=4096, ge=16)
    lyapunov_steps: int = Field(default=100_000, ge=1)
    autocorrelation_lags: int = Field(default=1000, ge=1)
    output: Optional[str] = None

    def with_seeds(self, seeds: List[int]) -> "SweepSpec":
        return self.model_copy(update={"grid": self.grid.model_copy(update={"seeds": seeds})})


def load_spec(path: Union[str, Path]) -> SweepSpec:
    """
    Read a TOML sweep file.

    Top-level keys mirror :class:`SweepSpec`; the parameter lists live in a ``[grid]`` table.
    """
    with open(path, "rb") as f:
        data = tomllib.load(f)
    return SweepSpec.model_validate(data)
