"""Data models for sweep results."""

from datetime import datetime, timezone
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field


class MetricRow(BaseModel):
    """One measured value with the full parameter tuple that produced it."""

    experiment: str
    metric: str
    variant: str = ""
    tau_or_index: int = 0
    value: float
    g: float
    epsilon: float
    eta_f: float
    d_e: int
    narma_order: int
    rho: float
    seed: Optional[int] = None
    aggregate: Literal["seed", "mean"] = "seed"
    status: Literal["ok", "error"] = "ok"
    error: str = ""


class SeedStats(BaseModel):
    """Spread of one metric over seeds."""

    mean: float
    std_dev: float
    min: float
    max: float
    count: int


class PointSummary(BaseModel):
    """Bookkeeping for one grid point."""

    index: int
    params: Dict[str, Any]
    status: Literal["ok", "error"]
    errors: List[str] = Field(default_factory=list)
    wall_time_seconds: float
    n_rows: int


class GridPointResult(BaseModel):
    """Rows produced by one grid point, in metric order."""

    index: int
    rows: List[MetricRow]
    wall_time_seconds: float

    @property
    def errors(self) -> List[str]:
        return [f"{row.metric}: {row.error}" for row in self.rows if row.status == "error"]

    def summary(self, params: Dict[str, Any]) -> PointSummary:
        return PointSummary(
            index=self.index,
            params=params,
            status="error" if self.errors else "ok",
            errors=self.errors,
            wall_time_seconds=self.wall_time_seconds,
            n_rows=len(self.rows),
        )


class MetricReport(BaseModel):
    """Complete sweep result."""

    experiment: str
    version: str
    spec: Dict[str, Any]
    calibrated: bool = False
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    rows: List[MetricRow] = Field(default_factory=list)
    points: List[PointSummary] = Field(default_factory=list)

    @property
    def n_errors(self) -> int:
        return sum(1 for row in self.rows if row.status == "error")
