"""
Driving and training signals.

Lorenz and Rössler trajectories (fixed-step RK4), NARMA sequences, Gaussian noise,
sine probes and normalized autocorrelation. Every generator is a pure function of its
parameters and seed.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import signal as sps

from resmem.core.exceptions import (
    DegenerateSignalError,
    IntegrationDivergedError,
    InvalidInputError,
    NarmaDivergedError,
)

logger = logging.getLogger(__name__)

DIVERGENCE_BOUND = 1e6
NARMA_MAX_ATTEMPTS = 10
NARMA_SUBSEED_STRIDE = 10**6


@dataclass(frozen=True)
class TimeSeries:
    """A finite, one-dimensional sampled signal."""

    values: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InvalidInputError(f"time series must be one-dimensional, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("time series contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.shape[0]

    def window(self, start: int, length: int) -> "TimeSeries":
        return TimeSeries(self.values[start : start + length], self.dt)


SignalLike = Union[TimeSeries, np.ndarray]


def as_values(s: SignalLike) -> np.ndarray:
    """Return the samples of ``s`` as a validated float array."""
    if isinstance(s, TimeSeries):
        return s.values
    values = np.asarray(s, dtype=float)
    if values.ndim != 1:
        raise InvalidInputError(f"signal must be one-dimensional, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("signal contains NaN or Inf")
    return values


def is_degenerate(values: np.ndarray) -> bool:
    """True when ``values`` has no variance beyond rounding noise."""
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    return values.size == 0 or float(np.std(values)) <= 16 * np.finfo(float).eps * scale


class OdeParams(BaseModel):
    """Parameters of a three-variable chaotic flow and its integration."""

    model_config = ConfigDict(frozen=True)

    p1: float
    p2: float
    p3: float
    p4: float = 0.0  # unused for Lorenz
    dt: float = Field(gt=0)
    substeps: int = Field(default=1, ge=1)  # RK4 steps per stored sample
    n_transient: int = Field(default=5000, ge=0)
    initial_state: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    perturbation: float = Field(default=0.1, ge=0)

    @classmethod
    def lorenz(cls, **overrides) -> "OdeParams":
        values = dict(p1=10.0, p2=28.0, p3=8.0 / 3.0, dt=0.02, substeps=2)
        values.update(overrides)
        return cls(**values)

    @classmethod
    def rossler(cls, **overrides) -> "OdeParams":
        values = dict(p1=1.0, p2=0.2, p3=0.2, p4=5.7, dt=0.3, substeps=30)
        values.update(overrides)
        return cls(**values)


class NarmaParams(BaseModel):
    """Order and constants of the NARMA recurrence."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(default=10, ge=1)
    a0: float = 0.3
    a1: float = 0.05
    a2: float = 1.5
    a3: float = 0.1
    u_low: float = 0.0
    u_high: float = 0.5

    @model_validator(mode="after")
    def _check_range(self) -> "NarmaParams":
        if not self.u_low < self.u_high:
            raise ValueError("u_low must be smaller than u_high")
        return self


def _lorenz_rhs(params: OdeParams) -> Callable[[np.ndarray], np.ndarray]:
    p1, p2, p3 = params.p1, params.p2, params.p3

    def rhs(v: np.ndarray) -> np.ndarray:
        x, y, z = v
        return np.array([p1 * (y - x), x * (p2 - z) - y, x * y - p3 * z])

    return rhs


def _rossler_rhs(params: OdeParams) -> Callable[[np.ndarray], np.ndarray]:
    p1, p2, p3, p4 = params.p1, params.p2, params.p3, params.p4

    def rhs(v: np.ndarray) -> np.ndarray:
        x, y, z = v
        return np.array([-y - p1 * z, x + p2 * y, p3 + z * (x - p4)])

    return rhs


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], v: np.ndarray, dt: float) -> np.ndarray:
    """Advance ``v`` by one classical fourth-order Runge-Kutta step."""
    k1 = rhs(v)
    k2 = rhs(v + 0.5 * dt * k1)
    k3 = rhs(v + 0.5 * dt * k2)
    k4 = rhs(v + dt * k3)
    return v + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _integrate(
    rhs: Callable[[np.ndarray], np.ndarray], params: OdeParams, n_steps: int, seed: int, name: str
) -> Tuple[TimeSeries, TimeSeries, TimeSeries]:
    if n_steps < 1:
        raise InvalidInputError("n_steps must be at least 1")

    rng = np.random.default_rng(seed)
    offset = rng.uniform(-params.perturbation, params.perturbation, size=3)
    state = np.asarray(params.initial_state, dtype=float)
    if params.perturbation > 0:
        state = state + offset

    out = np.empty((n_steps, 3))
    total = params.n_transient + n_steps
    h = params.dt / params.substeps
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(total):
            if step >= params.n_transient:
                out[step - params.n_transient] = state
            if step == total - 1:
                break
            for _ in range(params.substeps):
                state = rk4_step(rhs, state, h)
            if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > DIVERGENCE_BOUND:
                raise IntegrationDivergedError(f"{name} integration diverged at step {step + 1}")

    return tuple(TimeSeries(out[:, k].copy(), params.dt) for k in range(3))  # type: ignore


def integrate_lorenz(
    params: OdeParams, n_steps: int, seed: int
) -> Tuple[TimeSeries, TimeSeries, TimeSeries]:
    """
    Integrate the Lorenz system and return ``n_steps`` samples of x, y and z.

    The initial condition is ``params.initial_state`` plus a seeded uniform offset in
    ``[-perturbation, perturbation]^3``; ``n_transient`` steps are discarded first.

    Raises:
        IntegrationDivergedError: If any coordinate exceeds 1e6 in magnitude
    """
    return _integrate(_lorenz_rhs(params), params, n_steps, seed, "Lorenz")


def integrate_rossler(
    params: OdeParams, n_steps: int, seed: int
) -> Tuple[TimeSeries, TimeSeries, TimeSeries]:
    """Integrate the Rössler system; same contract as :func:`integrate_lorenz`."""
    return _integrate(_rossler_rhs(params), params, n_steps, seed, "Rössler")


def narma_recurrence(u: SignalLike, params: NarmaParams) -> np.ndarray:
    """
    Iterate the NARMA recurrence for a given input sequence.

    y(n+1) = a0 y(n) + a1 y(n) sum_{j=1..N} y(n-j) + a2 u(n-N+1) u(n) + a3,
    with y(0) = 0 and all samples before the start of the sequence taken as zero.
    """
    u = as_values(u)
    order = params.order
    n = u.shape[0]
    y = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n - 1):
            history = y[max(0, k - order) : k].sum()
            lagged = u[k - order + 1] if k - order + 1 >= 0 else 0.0
            y[k + 1] = (
                params.a0 * y[k]
                + params.a1 * y[k] * history
                + params.a2 * lagged * u[k]
                + params.a3
            )
    return y


def narma_generate(
    params: NarmaParams, n_steps: int, seed: int
) -> Tuple[TimeSeries, TimeSeries]:
    """
    Draw a uniform input sequence and the NARMA response to it.

    A sequence whose output leaves [-1, 1] is regenerated with sub-seed
    ``seed + 10**6 * attempt``.

    Raises:
        NarmaDivergedError: If all attempts diverge
    """
    if n_steps <= params.order:
        raise InvalidInputError("n_steps must exceed the NARMA order")

    for attempt in range(NARMA_MAX_ATTEMPTS):
        sub_seed = seed + NARMA_SUBSEED_STRIDE * attempt
        rng = np.random.default_rng(sub_seed)
        u = rng.uniform(params.u_low, params.u_high, size=n_steps)
        y = narma_recurrence(u, params)
        if np.all(np.isfinite(y)) and np.max(np.abs(y)) <= 1.0:
            return TimeSeries(u), TimeSeries(y)
        logger.info("NARMA order %d diverged with seed %d, regenerating", params.order, sub_seed)

    raise NarmaDivergedError(
        f"NARMA order {params.order} diverged on {NARMA_MAX_ATTEMPTS} attempts (seed {seed})"
    )


def gaussian_noise(n: int, seed: int) -> TimeSeries:
    """Zero-mean, unit-variance white Gaussian noise."""
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    return TimeSeries(np.random.default_rng(seed).standard_normal(n))


def sine_probe(period: float, n: int) -> TimeSeries:
    """Samples sin(2 pi k / period) for k = 0 .. n-1."""
    if period <= 0:
        raise InvalidInputError("period must be positive")
    return TimeSeries(np.sin(2.0 * np.pi * np.arange(n) / period))


def autocorrelation(x: SignalLike, max_lag: int) -> np.ndarray:
    """
    Normalized autocorrelation of the mean-removed signal for lags 0 .. max_lag.

    Raises:
        DegenerateSignalError: If the signal has zero variance
    """
    values = as_values(x)
    if values.shape[0] <= max_lag:
        raise InvalidInputError("signal must be longer than max_lag")
    if is_degenerate(values):
        raise DegenerateSignalError("autocorrelation of a constant signal is undefined")

    centered = values - values.mean()
    full = sps.correlate(centered, centered, mode="full", method="fft")
    zero = centered.shape[0] - 1
    lags = full[zero : zero + max_lag + 1]
    return lags / lags[0]
