"""Quadratic feature matrix, ridge readout and normalized errors."""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy import linalg

from resmem.core.config import settings
from resmem.core.exceptions import (
    DegenerateTargetError,
    InvalidInputError,
    SingularSystemError,
)
from resmem.reservoir import AdjacencyMatrix, ReservoirConfig, StateTrajectory, drive_reservoir
from resmem.signals import SignalLike, as_values, is_degenerate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureMatrix:
    """Rows are time samples; columns are states, then squared states if requested."""

    values: np.ndarray
    include_squares: bool
    state_dim: int

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]


class ReadoutModel(BaseModel):
    """Trained linear readout; serializes to JSON."""

    coefficients: List[float]
    ridge_lambda: float = Field(ge=0)
    include_squares: bool
    state_dim: int

    @model_validator(mode="after")
    def _check_length(self) -> "ReadoutModel":
        expected = self.state_dim * (2 if self.include_squares else 1)
        if len(self.coefficients) != expected:
            raise ValueError(f"expected {expected} coefficients, got {len(self.coefficients)}")
        return self

    def predict(self, features: FeatureMatrix) -> np.ndarray:
        if features.n_columns != len(self.coefficients):
            raise InvalidInputError("feature matrix does not match the trained readout")
        return features.values @ np.asarray(self.coefficients)


class TrainTestResult(NamedTuple):
    train_error: float
    test_error: float
    model: ReadoutModel


def build_features(traj: StateTrajectory, include_squares: bool = True) -> FeatureMatrix:
    """Stack ``[r_1 .. r_D]`` and, if requested, ``[r_1^2 .. r_D^2]``."""
    states = np.asarray(traj.states, dtype=float)
    if states.ndim != 2 or states.shape[0] == 0:
        raise InvalidInputError("trajectory is empty")
    values = np.hstack([states, states**2]) if include_squares else states
    return FeatureMatrix(values, include_squares, states.shape[1])


def default_ridge_lambda(values: np.ndarray) -> float:
    """Scale-free default: relative factor times the mean diagonal of Omega^T Omega."""
    return settings.ridge_relative_lambda * float(np.sum(values**2)) / values.shape[1]


def ridge_coefficients(values: np.ndarray, targets: np.ndarray, ridge_lambda: float) -> np.ndarray:
    """
    Solve min ||Omega C - f||^2 + lambda ||C||^2 through the thin SVD of Omega.

    ``targets`` may be one-dimensional or hold one target per column.

    Raises:
        SingularSystemError: If lambda is zero and Omega is rank deficient
    """
    if ridge_lambda < 0:
        raise InvalidInputError("ridge lambda must be non-negative")
    U, s, Vt = linalg.svd(values, full_matrices=False)
    if ridge_lambda == 0:
        tol = s[0] * max(values.shape) * np.finfo(float).eps if s.size else 0.0
        if s.size < values.shape[1] or s.size == 0 or s[-1] <= tol:
            raise SingularSystemError("feature matrix is rank deficient and lambda is zero")
    filt = s / (s**2 + ridge_lambda)
    projected = U.T @ targets
    if projected.ndim == 1:
        return Vt.T @ (filt * projected)
    return Vt.T @ (filt[:, None] * projected)


def ridge_fit(
    features: FeatureMatrix, target: SignalLike, ridge_lambda: Optional[float] = None
) -> ReadoutModel:
    """Fit the readout coefficients; ``ridge_lambda=None`` uses the relative default."""
    f = as_values(target)
    if f.shape[0] != features.values.shape[0]:
        raise InvalidInputError(
            f"target has {f.shape[0]} samples but features have {features.values.shape[0]} rows"
        )
    lam = default_ridge_lambda(features.values) if ridge_lambda is None else float(ridge_lambda)
    C = ridge_coefficients(features.values, f, lam)
    return ReadoutModel(
        coefficients=C.tolist(),
        ridge_lambda=lam,
        include_squares=features.include_squares,
        state_dim=features.state_dim,
    )


def nrmse(predicted: SignalLike, target: SignalLike) -> float:
    """
    std(target - predicted) / std(target).

    Raises:
        DegenerateTargetError: If the target is constant
    """
    p, f = as_values(predicted), as_values(target)
    if p.shape != f.shape or f.shape[0] < 2:
        raise InvalidInputError("predicted and target need equal lengths of at least 2")
    if is_degenerate(f):
        raise DegenerateTargetError("target is constant")
    return float(np.std(f - p) / np.std(f))


def align_target(config: ReservoirConfig, target: SignalLike) -> np.ndarray:
    """Return the ``n_fit`` target samples aligned with the post-washout states."""
    values = as_values(target)
    if values.shape[0] == config.n_fit:
        return values
    if values.shape[0] < config.washout + config.n_fit:
        raise InvalidInputError(
            f"target has {values.shape[0]} samples; need n_fit or washout + n_fit"
        )
    return values[config.washout : config.washout + config.n_fit]


def _features(traj: StateTrajectory, include_squares: bool, first_only: bool) -> FeatureMatrix:
    if first_only:
        traj = traj.first_components()
    return build_features(traj, include_squares)


def train_test(
    config: ReservoirConfig,
    A: AdjacencyMatrix,
    train_input: SignalLike,
    train_target: SignalLike,
    test_input: SignalLike,
    test_target: SignalLike,
    ridge_lambda: Optional[float] = None,
    include_squares: bool = True,
    first_components_only: bool = False,
) -> TrainTestResult:
    """
    Fit the readout on the training run, then apply the frozen coefficients to the test run.

    Returns the training error, the testing error and the fitted model.
    """
    train_features = _features(
        drive_reservoir(config, A, train_input), include_squares, first_components_only
    )
    f_train = align_target(config, train_target)
    model = ridge_fit(train_features, f_train, ridge_lambda)
    train_error = nrmse(model.predict(train_features), f_train)

    test_features = _features(
        drive_reservoir(config, A, test_input), include_squares, first_components_only
    )
    f_test = align_target(config, test_target)
    test_error = nrmse(model.predict(test_features), f_test)

    logger.debug("train error %.4g, test error %.4g", train_error, test_error)
    return TrainTestResult(train_error, test_error, model)
