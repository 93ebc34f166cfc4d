"""
Lyapunov exponents of the driven reservoir.

The variational matrix is propagated through the reservoir Jacobian along the driven
trajectory and re-orthonormalized with modified Gram-Schmidt.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from resmem.core.config import settings
from resmem.core.exceptions import InsufficientDataError, InvalidInputError, NumericalError
from resmem.reservoir import AdjacencyMatrix, ReservoirConfig, simulate
from resmem.signals import SignalLike, as_values

logger = logging.getLogger(__name__)


class LyapunovSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_lambda: int = Field(default=1, ge=1)
    n_steps: int = Field(default=100_000, ge=1)
    renorm_every: int = Field(default=1, ge=1)
    norm_reset_threshold: float = Field(default=1e12, gt=1)
    report_every: int = Field(default_factory=lambda: settings.lyapunov_report_every, ge=1)


@dataclass(frozen=True)
class LyapunovResult:
    """Exponents in nats per step, largest first, plus convergence bookkeeping."""

    exponents: np.ndarray
    running: List[Tuple[int, np.ndarray]] = field(default_factory=list, repr=False)
    n_resets: int = 0
    saturated: bool = False

    @property
    def largest(self) -> float:
        return float(self.exponents[0])


def node_gains(config: ReservoirConfig, arguments: np.ndarray) -> np.ndarray:
    """Derivative of g tanh at the given arguments."""
    return config.g * (1.0 - np.tanh(arguments) ** 2)


def jacobian_tanh(
    config: ReservoirConfig, A: AdjacencyMatrix, r: np.ndarray, s: float
) -> np.ndarray:
    """diag(g (1 - tanh^2(A r + eps s))) A."""
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("state must be finite")
    gains = node_gains(config, A.entries @ r + config.epsilon * s)
    return gains[:, None] * A.entries


def jacobian_multidim(
    config: ReservoirConfig, A: AdjacencyMatrix, x: np.ndarray, s: float
) -> np.ndarray:
    """Jacobian of the delay-augmented node for a component-major state of length M*d_e."""
    M, d_e = config.M, config.d_e
    x = np.asarray(x, dtype=float).reshape(d_e, M)
    arg = A.entries @ x[0] + config.epsilon * s + config.delay_feedback * x[d_e - 1]
    gains = node_gains(config, arg)
    J = np.zeros((M * d_e, M * d_e))
    J[:M, :M] = gains[:, None] * A.entries
    J[:M, (d_e - 1) * M :] += np.diag(gains * config.delay_feedback)
    J[M:, : (d_e - 1) * M] += np.eye((d_e - 1) * M)
    return J


def apply_jacobian(
    config: ReservoirConfig, A: AdjacencyMatrix, gains: np.ndarray, delta: np.ndarray
) -> np.ndarray:
    """Multiply ``delta`` by the Jacobian whose node gains are ``gains`` without forming it."""
    M = config.M
    if config.node_type == "tanh":
        return gains[:, None] * (A.entries @ delta)

    d_e = config.d_e
    out = np.empty_like(delta)
    first = A.entries @ delta[:M] + config.delay_feedback * delta[(d_e - 1) * M :]
    out[:M] = gains[:, None] * first
    out[M:] = delta[: (d_e - 1) * M]
    return out


def random_orthonormal(rng: np.random.Generator, n_rows: int, n_cols: int) -> np.ndarray:
    """Random matrix with orthonormal columns (n_cols <= n_rows)."""
    q, r = np.linalg.qr(rng.standard_normal((n_rows, n_cols)))
    return q * np.sign(np.diag(r))


def gram_schmidt(Q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt on the columns of ``Q``; returns (orthonormal Q, norms)."""
    Q = Q.copy()
    n = Q.shape[1]
    norms = np.empty(n)
    for j in range(n):
        for i in range(j):
            Q[:, j] -= (Q[:, i] @ Q[:, j]) * Q[:, i]
        norms[j] = np.linalg.norm(Q[:, j])
        if norms[j] > 0:
            Q[:, j] /= norms[j]
    return Q, norms


def propagate_exponents(
    step: Callable[[int, np.ndarray], np.ndarray],
    dim: int,
    spec: LyapunovSpec,
    seed: int,
) -> LyapunovResult:
    """
    Accumulate log growth of ``spec.n_lambda`` orthonormal directions.

    ``step(k, Q)`` returns the Jacobian at step k applied to Q.
    """
    if not 1 <= spec.n_lambda <= dim:
        raise InvalidInputError(f"n_lambda must be in [1, {dim}]")
    rng = np.random.default_rng(seed)
    Q = random_orthonormal(rng, dim, spec.n_lambda)
    log_floor = -np.log(spec.norm_reset_threshold)
    log_ceiling = np.log(spec.norm_reset_threshold)

    total = np.zeros(spec.n_lambda)
    running: List[Tuple[int, np.ndarray]] = []
    n_resets = 0
    saturated = False

    for k in range(spec.n_steps):
        Q = step(k, Q)
        last = k == spec.n_steps - 1
        if (k + 1) % spec.renorm_every and not last:
            continue
        if not np.all(np.isfinite(Q)):
            raise NumericalError(f"variational matrix became non-finite at step {k + 1}")

        Q, norms = gram_schmidt(Q)
        with np.errstate(divide="ignore"):
            logs = np.log(norms)
        out_of_range = (logs < log_floor) | (logs > log_ceiling)
        if np.any(logs < log_floor):
            saturated = True
        total += np.clip(logs, log_floor, None)
        if np.any(out_of_range):
            n_resets += 1
            Q = random_orthonormal(rng, dim, spec.n_lambda)

        if (k + 1) % spec.report_every == 0:
            estimate = total / (k + 1)
            running.append((k + 1, estimate))
            logger.debug("step %d: largest exponent %.6f", k + 1, estimate[0])

    exponents = np.sort(total / spec.n_steps)[::-1]
    if saturated:
        logger.warning("variational norms fell below the reset threshold; exponents are bounds")
    return LyapunovResult(exponents, running, n_resets, saturated)


def lyapunov_spectrum(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    drive: SignalLike,
    spec: Optional[LyapunovSpec] = None,
    seed: int = 0,
) -> LyapunovResult:
    """
    Largest ``spec.n_lambda`` exponents of the reservoir driven by ``drive``.

    The first ``config.washout`` samples settle the reservoir; the next ``spec.n_steps``
    samples carry the variational propagation.
    """
    spec = spec or LyapunovSpec()
    values = as_values(drive)
    total = config.washout + spec.n_steps
    if values.shape[0] < total:
        raise InsufficientDataError(f"drive has {values.shape[0]} samples, need {total}")

    _, arguments = simulate(config, A, values, total, keep_states=False)
    gains = node_gains(config, arguments[config.washout :])

    def step(k: int, Q: np.ndarray) -> np.ndarray:
        return apply_jacobian(config, A, gains[k], Q)

    return propagate_exponents(step, config.state_dim, spec, seed)


def constant_jacobian_spectrum(
    J: np.ndarray, spec: Optional[LyapunovSpec] = None, seed: int = 0
) -> LyapunovResult:
    """Exponents of the autonomous linear map x(n+1) = J x(n)."""
    spec = spec or LyapunovSpec()
    J = np.asarray(J, dtype=float)
    return propagate_exponents(lambda _, Q: J @ Q, J.shape[0], spec, seed)
