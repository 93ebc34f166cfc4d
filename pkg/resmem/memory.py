"""
Memory statistics of a reservoir.

memory capacity      squared correlation between delayed noise input and its linear fit
norm of variation    summed size of a perturbation propagated along the driven trajectory
delay capacity       trace of the cross covariance of whitened states and their delays
nonlinear index      harmonic content above the fundamental for sine probes
"""

import logging
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.sparse.linalg import svds

from resmem.core.config import settings
from resmem.core.exceptions import (
    DegenerateResponseError,
    DegenerateStateError,
    InsufficientDataError,
    InvalidInputError,
    NumericalError,
)
from resmem.lyapunov import apply_jacobian, node_gains, random_orthonormal
from resmem.readout import build_features, default_ridge_lambda, ridge_coefficients
from resmem.reservoir import (
    AdjacencyMatrix,
    ReservoirConfig,
    StateTrajectory,
    drive_reservoir,
    simulate,
)
from resmem.signals import SignalLike, TimeSeries, as_values, gaussian_noise, sine_probe

logger = logging.getLogger(__name__)

DENSE_NORM_LIMIT = 200


@dataclass(frozen=True)
class MemoryCurve:
    """Per-delay values; ``taus[k]`` is the delay of ``values[k]``."""

    values: np.ndarray
    taus: np.ndarray
    kind: Literal["memory_capacity", "delay_trace"] = "memory_capacity"

    @property
    def tau_max(self) -> int:
        return int(self.taus[-1])


@dataclass(frozen=True)
class VariationResult:
    """Mean perturbation norm per step (n = 0 .. tau_max) and its time-summed mean."""

    mean_norms: np.ndarray
    sums: np.ndarray
    d_var: float
    n_samples: int
    norm: str = "spectral"


@dataclass(frozen=True)
class WhitenedEnsemble:
    """Whitened signals and the transform that produced them."""

    values: np.ndarray
    transform: np.ndarray
    l_reg: float


class DelayCapacityResult(NamedTuple):
    curve: MemoryCurve
    theta_d: float


def squared_correlation(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Pearson correlation, 0 when either signal is constant."""
    da = a - a.mean()
    db = b - b.mean()
    denominator = float(np.dot(da, da) * np.dot(db, db))
    if denominator == 0:
        return 0.0
    return float(np.clip(np.dot(da, db) ** 2 / denominator, 0.0, 1.0))


def memory_capacity_curve(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    seed: int,
    tau_max: Optional[int] = None,
    ridge_lambda: Optional[float] = None,
) -> MemoryCurve:
    """
    MC_tau for tau = 1 .. tau_max with a unit Gaussian noise drive.

    Each delayed input is fit with linear features only (no squared states).

    Raises:
        DegenerateStateError: If the reservoir states are identically zero
    """
    tau_max = settings.tau_max if tau_max is None else tau_max
    if config.washout < tau_max:
        raise InsufficientDataError(
            f"washout {config.washout} is shorter than tau_max {tau_max}; delayed "
            "targets would reach before the drive"
        )

    noise = gaussian_noise(config.washout + config.n_fit, seed).values
    traj = drive_reservoir(config, A, noise)
    if not np.any(traj.states):
        raise DegenerateStateError("reservoir states are identically zero")

    features = build_features(traj, include_squares=False).values
    taus = np.arange(1, tau_max + 1)
    start = config.washout
    targets = np.column_stack([noise[start - tau : start - tau + config.n_fit] for tau in taus])

    lam = default_ridge_lambda(features) if ridge_lambda is None else ridge_lambda
    fits = features @ ridge_coefficients(features, targets, lam)
    values = np.array([squared_correlation(targets[:, k], fits[:, k]) for k in range(tau_max)])
    return MemoryCurve(values, taus, "memory_capacity")


def total_memory_capacity(curve: MemoryCurve) -> float:
    """Sum of MC_tau over tau >= 1."""
    return float(np.sum(curve.values[curve.taus >= 1]))


def _matrix_norm(x: np.ndarray, norm: str) -> float:
    if norm == "frobenius":
        return float(np.linalg.norm(x))
    if not np.any(x):
        return 0.0
    if min(x.shape) <= DENSE_NORM_LIMIT:
        return float(np.linalg.norm(x, 2))
    v0 = np.full(min(x.shape), 1.0 / np.sqrt(min(x.shape)))
    return float(svds(x, k=1, v0=v0, return_singular_vectors=False)[0])


def norm_of_variation(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    drive: SignalLike,
    tau_max: Optional[int] = None,
    n_samples: int = 100,
    seed: int = 0,
    norm: Literal["spectral", "frobenius"] = "spectral",
) -> VariationResult:
    """
    Propagate random orthonormal perturbations through the reservoir Jacobian.

    Sample j starts at ``washout + j * tau_max`` in one driven run, so the windows are
    disjoint. D_var is the mean over samples of sum_{n=1..tau_max} ||delta_n||.
    """
    tau_max = settings.tau_max if tau_max is None else tau_max
    values = as_values(drive)
    total = config.washout + n_samples * tau_max
    if values.shape[0] < total:
        raise InsufficientDataError(
            f"drive has {values.shape[0]} samples, need {total} for {n_samples} windows"
        )

    _, arguments = simulate(config, A, values, total, keep_states=False)
    gains = node_gains(config, arguments)
    if not np.all(np.isfinite(gains)):
        raise NumericalError("non-finite Jacobian along the trajectory")

    rng = np.random.default_rng(seed)
    dim = config.state_dim
    norms = np.empty((n_samples, tau_max + 1))
    for j in range(n_samples):
        start = config.washout + j * tau_max
        delta = random_orthonormal(rng, dim, dim)
        norms[j, 0] = _matrix_norm(delta, norm)
        for n in range(1, tau_max + 1):
            delta = apply_jacobian(config, A, gains[start + n - 1], delta)
            norms[j, n] = _matrix_norm(delta, norm)

    sums = norms[:, 1:].sum(axis=1)
    return VariationResult(norms.mean(axis=0), sums, float(sums.mean()), n_samples, norm)


def whiten(R0: np.ndarray, L_reg: Optional[float] = None) -> WhitenedEnsemble:
    """
    Whiten mean-centered rows of ``R0`` (M x N).

    C = R0 R0^T / N + L_reg I = U S V^T and the result is S^(-1/2) V^T R0.
    """
    L_reg = settings.l_reg if L_reg is None else L_reg
    R0 = np.asarray(R0, dtype=float)
    if not np.all(np.isfinite(R0)):
        raise NumericalError("signals contain NaN or Inf")
    M, N = R0.shape
    if N <= M:
        raise InsufficientDataError(f"need more samples than signals, got {N} for {M}")

    C = R0 @ R0.T / N + L_reg * np.eye(M)
    _, S, Vt = linalg.svd(C)
    transform = Vt / np.sqrt(S)[:, None]
    return WhitenedEnsemble(transform @ R0, transform, L_reg)


def _centered_window(states: np.ndarray, start: int, length: int) -> np.ndarray:
    window = states[start : start + length].T
    return window - window.mean(axis=1, keepdims=True)


def delay_capacity(
    traj: StateTrajectory,
    tau_max: Optional[int] = None,
    L_reg: Optional[float] = None,
    n_points: Optional[int] = None,
    shared_whitener: bool = True,
) -> DelayCapacityResult:
    """
    Trace|C(tau)| for tau = 0 .. tau_max and Theta_d = sum / tau_max.

    R_0 holds the last ``n_points`` samples (default: all but the first tau_max), R_tau
    the same window shifted back by tau. With ``shared_whitener`` the R_0 transform is
    reused for every R_tau; otherwise each window is whitened on its own.
    """
    tau_max = settings.tau_max if tau_max is None else tau_max
    if tau_max < 1:
        raise InvalidInputError(f"tau_max must be at least 1, got {tau_max}")
    states = np.asarray(traj.states, dtype=float)
    n_rows, dim = states.shape
    N = n_rows - tau_max if n_points is None else n_points
    if N <= 0 or n_rows < tau_max + N:
        raise InsufficientDataError(
            f"trajectory has {n_rows} samples, need tau_max + N = {tau_max + max(N, 1)}"
        )
    if N <= dim:
        raise InsufficientDataError(f"need more than {dim} samples per window, got {N}")

    base = whiten(_centered_window(states, tau_max, N), L_reg)
    traces = np.empty(tau_max + 1)
    for tau in range(tau_max + 1):
        R_tau = _centered_window(states, tau_max - tau, N)
        if shared_whitener:
            whitened = base.transform @ R_tau
        else:
            whitened = whiten(R_tau, base.l_reg).values
        diagonal = np.einsum("it,it->i", base.values, whitened) / N
        traces[tau] = np.sum(np.abs(diagonal))

    curve = MemoryCurve(traces, np.arange(tau_max + 1), "delay_trace")
    return DelayCapacityResult(curve, float(traces.sum() / tau_max))


def probe_periods(
    n_probes: int = 100,
    period_range: Tuple[float, float] = (10.0, 50.0),
    probe_length: int = 4096,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sine probe periods snapped so each completes a whole number of cycles in the window.

    Returns ``(periods, cycles)``; ``cycles`` is also the fundamental DFT bin.
    """
    nominal = np.linspace(period_range[0], period_range[1], n_probes)
    cycles = np.round(probe_length / nominal).astype(int)
    return probe_length / cycles, cycles


def node_nonlinear_index(states: np.ndarray, fundamental_bin: int) -> float:
    """
    Mean over nodes of (sum of |F_i(f)| above the fundamental) / |F_i(fundamental)|.

    Raises:
        DegenerateResponseError: If any node has no amplitude at the fundamental
    """
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[:, None]
    spectrum = np.abs(np.fft.rfft(states, axis=0))
    fundamental = spectrum[fundamental_bin]
    if np.any(fundamental <= 1e-12 * states.shape[0]):
        raise DegenerateResponseError(f"zero response at fundamental bin {fundamental_bin}")
    above = spectrum[fundamental_bin + 1 :].sum(axis=0)
    return float(np.mean(above / fundamental))


def nonlinear_index_curve(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    n_probes: int = 100,
    probe_length: int = 4096,
    period_range: Tuple[float, float] = (10.0, 50.0),
    drive: Optional[Callable[[TimeSeries], StateTrajectory]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gamma(f_j) for each sine probe; returns ``(periods, gammas)``.

    ``drive`` overrides the reservoir; it receives a probe of ``washout + probe_length``
    samples and must return ``probe_length`` post-washout states.
    """
    probe_config = config.model_copy(update={"n_fit": probe_length})
    periods, cycles = probe_periods(n_probes, period_range, probe_length)
    gammas = np.empty(n_probes)
    for j, (period, bin_) in enumerate(zip(periods, cycles)):
        s = sine_probe(period, probe_config.washout + probe_length)
        traj = drive(s) if drive is not None else drive_reservoir(probe_config, A, s)
        gammas[j] = node_nonlinear_index(traj.first_components().states, int(bin_))
    return periods, gammas


def nonlinear_index(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    n_probes: int = 100,
    probe_length: int = 4096,
    period_range: Tuple[float, float] = (10.0, 50.0),
    drive: Optional[Callable[[TimeSeries], StateTrajectory]] = None,
) -> float:
    """Mean nonlinear index over the sine probes."""
    _, gammas = nonlinear_index_curve(config, A, n_probes, probe_length, period_range, drive)
    return float(gammas.mean())
