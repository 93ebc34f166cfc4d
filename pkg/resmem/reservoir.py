"""
Adjacency matrices and reservoir simulation.

Row ``k`` of every returned trajectory is the reservoir state produced by consuming
input sample ``washout + k``; states are therefore aligned with the input (and any
target) sample of the same index.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg

from resmem.core.exceptions import (
    InsufficientDataError,
    InvalidInputError,
    InvalidMatrixError,
    InvalidSparsityError,
    ReservoirDivergedError,
)
from resmem.signals import SignalLike, TimeSeries, as_values

logger = logging.getLogger(__name__)

LINEAR_DIVERGENCE_BOUND = 1e12


def spectral_radius_of(entries: np.ndarray) -> float:
    """Modulus of the largest eigenvalue."""
    return float(np.max(np.abs(linalg.eigvals(entries))))


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Coupling matrix with its occupied fraction and spectral radius."""

    entries: np.ndarray
    eta_f: float
    spectral_radius: float
    seed: int = 0

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidMatrixError(f"adjacency matrix must be square, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_entries(cls, entries, seed: int = 0) -> "AdjacencyMatrix":
        entries = np.asarray(entries, dtype=float)
        M = entries.shape[0]
        eta_f = float(np.count_nonzero(entries)) / (M * M)
        return cls(entries, eta_f, spectral_radius_of(entries), seed)

    @property
    def M(self) -> int:
        return self.entries.shape[0]

    @property
    def mask(self) -> np.ndarray:
        return self.entries != 0


def make_adjacency(
    M: int, eta_f: float, spectral_radius: float = 1.0, seed: int = 0
) -> AdjacencyMatrix:
    """
    Random Gaussian adjacency matrix with ``round(eta_f * M**2)`` nonzero entries.

    A random permutation pattern is placed first so every row and every column holds at
    least one entry; the remaining entries are spread uniformly over the free cells.

    Raises:
        InvalidSparsityError: If fewer than M entries would be occupied
    """
    if M < 2:
        raise InvalidInputError("M must be at least 2")
    if not 0 < eta_f <= 1:
        raise InvalidSparsityError(f"eta_f must be in (0, 1], got {eta_f}")
    if spectral_radius <= 0:
        raise InvalidInputError("spectral_radius must be positive")

    n_nonzero = int(round(eta_f * M * M))
    if n_nonzero < M:
        raise InvalidSparsityError(
            f"eta_f={eta_f} gives {n_nonzero} entries, fewer than the {M} needed "
            "to cover every row and column"
        )

    rng = np.random.default_rng(seed)
    mask = np.zeros((M, M), dtype=bool)
    mask[np.arange(M), rng.permutation(M)] = True
    free = np.flatnonzero(~mask)
    extra = rng.choice(free, size=n_nonzero - M, replace=False)
    mask.flat[extra] = True

    entries = np.zeros((M, M))
    entries[mask] = rng.standard_normal(n_nonzero)

    current = spectral_radius_of(entries)
    if current == 0:
        raise InvalidMatrixError("generated matrix has zero spectral radius")
    entries *= spectral_radius / current
    return AdjacencyMatrix(entries, n_nonzero / (M * M), spectral_radius, seed)


def rescale_spectral_radius(A: AdjacencyMatrix, rho: float) -> AdjacencyMatrix:
    """Multiply every entry by ``rho / A.spectral_radius``; the pattern is unchanged."""
    if rho <= 0:
        raise InvalidInputError("rho must be positive")
    if A.spectral_radius == 0 or not np.any(A.entries):
        raise InvalidMatrixError("cannot rescale a matrix with zero spectral radius")
    return AdjacencyMatrix(A.entries * (rho / A.spectral_radius), A.eta_f, rho, A.seed)


def save_adjacency_csv(A: AdjacencyMatrix, path: Union[str, Path]):
    """Write the dense matrix row-major with full float precision."""
    output_file = Path(path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(output_file, A.entries, delimiter=",", fmt="%.17g")


def load_adjacency_csv(path: Union[str, Path], seed: int = 0) -> AdjacencyMatrix:
    entries = np.loadtxt(Path(path), delimiter=",", ndmin=2)
    return AdjacencyMatrix.from_entries(entries, seed)


class ReservoirConfig(BaseModel):
    """Node nonlinearity parameters and run lengths."""

    model_config = ConfigDict(frozen=True)

    M: int = Field(default=100, ge=1)
    g: float = 1.0
    epsilon: float = 1.0
    d_e: int = Field(default=1, ge=1)
    delay_feedback: float = 0.5
    node_type: Literal["tanh", "multidim"] = "tanh"
    washout: int = Field(default=1000, ge=0)
    n_fit: int = Field(default=10000, ge=1)

    @property
    def state_dim(self) -> int:
        return self.M * self.d_e if self.node_type == "multidim" else self.M


@dataclass(frozen=True)
class StateTrajectory:
    """
    Post-washout node time series.

    For multidimensional nodes the columns are component-major: the first M columns
    are r_{i,1}, the next M are r_{i,2}, and so on.
    """

    states: np.ndarray
    config: Optional[ReservoirConfig] = None
    input: Optional[TimeSeries] = field(default=None, repr=False)
    d_e: int = 1

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.states.shape[1] // self.d_e

    def first_components(self) -> "StateTrajectory":
        return StateTrajectory(self.states[:, : self.n_nodes], self.config, self.input, 1)


def _check_lengths(config: ReservoirConfig, A: AdjacencyMatrix, values: np.ndarray) -> int:
    if A.M != config.M:
        raise InvalidInputError(f"adjacency is {A.M}x{A.M} but config.M={config.M}")
    total = config.washout + config.n_fit
    if values.shape[0] < total:
        raise InsufficientDataError(
            f"drive has {values.shape[0]} samples, need washout + n_fit = {total}"
        )
    return total


def simulate(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    s: SignalLike,
    n_steps: Optional[int] = None,
    keep_states: bool = True,
) -> Tuple[Optional[np.ndarray], np.ndarray]:
    """
    Run the configured node from the zero state for ``n_steps`` inputs.

    Returns ``(states, arguments)``: ``states[n]`` is the full state after consuming
    ``s(n)`` and ``arguments[n]`` the tanh argument of the first components at that step,
    which is what the Jacobian needs. ``states`` is None when ``keep_states`` is False.
    """
    values = as_values(s)
    n_steps = values.shape[0] if n_steps is None else n_steps
    if values.shape[0] < n_steps:
        raise InsufficientDataError(f"drive has {values.shape[0]} samples, need {n_steps}")
    if A.M != config.M:
        raise InvalidInputError(f"adjacency is {A.M}x{A.M} but config.M={config.M}")

    entries = A.entries
    M, g, eps = config.M, config.g, config.epsilon
    arguments = np.empty((n_steps, M))
    states = np.empty((n_steps, config.state_dim)) if keep_states else None

    if config.node_type == "tanh":
        r = np.zeros(M)
        for n in range(n_steps):
            arg = entries @ r + eps * values[n]
            r = g * np.tanh(arg)
            arguments[n] = arg
            if states is not None:
                states[n] = r
        return states, arguments

    d_e, fb = config.d_e, config.delay_feedback
    x = np.zeros((d_e, M))
    for n in range(n_steps):
        arg = entries @ x[0] + eps * values[n] + fb * x[d_e - 1]
        x[1:] = x[:-1].copy()
        x[0] = g * np.tanh(arg)
        arguments[n] = arg
        if states is not None:
            states[n] = x.ravel()
    return states, arguments


def _drive(config: ReservoirConfig, A: AdjacencyMatrix, s: SignalLike) -> StateTrajectory:
    values = as_values(s)
    total = _check_lengths(config, A, values)
    states, _ = simulate(config, A, values, total)
    d_e = config.d_e if config.node_type == "multidim" else 1
    series = s if isinstance(s, TimeSeries) else TimeSeries(values)
    return StateTrajectory(states[config.washout :], config, series, d_e)


def drive_tanh(config: ReservoirConfig, A: AdjacencyMatrix, s: SignalLike) -> StateTrajectory:
    """
    Drive R(n+1) = g tanh(A R(n) + eps s(n)) from R(0) = 0.

    Returns the ``n_fit`` states after the washout.
    """
    return _drive(config.model_copy(update={"node_type": "tanh"}), A, s)


def drive_multidim(
    config: ReservoirConfig, A: AdjacencyMatrix, s: SignalLike
) -> StateTrajectory:
    """
    Drive tanh nodes augmented with a length-``d_e`` delay line.

    r_{i,1}(n+1) = g tanh(sum_j A_ij r_{j,1}(n) + eps s(n) + b r_{i,d_e}(n)) and
    r_{i,j}(n+1) = r_{i,j-1}(n), with b = ``config.delay_feedback``.
    """
    return _drive(config.model_copy(update={"node_type": "multidim"}), A, s)


def drive_reservoir(
    config: ReservoirConfig, A: AdjacencyMatrix, s: SignalLike
) -> StateTrajectory:
    """Dispatch on ``config.node_type``."""
    return _drive(config, A, s)


def drive_linear(
    A: AdjacencyMatrix,
    rho: float,
    s: SignalLike,
    n_steps: int,
    input_weights: Optional[np.ndarray] = None,
    washout: int = 0,
) -> StateTrajectory:
    """
    Drive the linear reservoir R(n+1) = rho A R(n) + W s(n) from R(0) = 0.

    ``W`` defaults to all ones. Row k of the result is R(washout + k + 1).

    Raises:
        ReservoirDivergedError: If any state exceeds 1e12 in magnitude
    """
    values = as_values(s)
    total = washout + n_steps
    if values.shape[0] < total:
        raise InsufficientDataError(f"drive has {values.shape[0]} samples, need {total}")

    W = np.ones(A.M) if input_weights is None else np.asarray(input_weights, dtype=float)
    coupling = rho * A.entries
    states = np.empty((total, A.M))
    r = np.zeros(A.M)
    for n in range(total):
        r = coupling @ r + W * values[n]
        if not np.all(np.isfinite(r)) or np.max(np.abs(r)) > LINEAR_DIVERGENCE_BOUND:
            raise ReservoirDivergedError(f"linear reservoir diverged at step {n + 1}")
        states[n] = r

    series = s if isinstance(s, TimeSeries) else TimeSeries(values)
    return StateTrajectory(states[washout:], None, series, 1)
