"""
Sweep Runner

Evaluates every point of a sweep grid, optionally in a process pool, and collects the
rows into a single report. Each grid point is a pure function of the spec and its
seed, so results merge by grid index regardless of evaluation order.
"""

import itertools
import logging
import time
from dataclasses import asdict, dataclass
from functools import cached_property, lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import ValidationError

from metrics_exporter.models import GridPointResult, MetricReport, MetricRow
from resmem.core.config import settings
from resmem.core.exceptions import InvalidInputError, ResmemError
from resmem.harness.specs import SweepSpec
from resmem.lyapunov import LyapunovSpec, lyapunov_spectrum
from resmem.memory import (
    delay_capacity,
    memory_capacity_curve,
    nonlinear_index,
    norm_of_variation,
    total_memory_capacity,
)
from resmem.netstats import (
    calibrate_spectral_radius,
    linear_delay_coefficients,
    path_length_report,
)
from resmem.readout import train_test
from resmem.reservoir import (
    AdjacencyMatrix,
    ReservoirConfig,
    drive_reservoir,
    make_adjacency,
    rescale_spectral_radius,
)
from resmem.signals import (
    NarmaParams,
    OdeParams,
    TimeSeries,
    autocorrelation,
    gaussian_noise,
    integrate_lorenz,
    integrate_rossler,
    narma_generate,
)

logger = logging.getLogger(__name__)

# (metric name, variant, tau or index, value)
Measurement = Tuple[str, str, int, float]

# RuntimeError covers scipy.sparse.linalg.ArpackNoConvergence
RECOVERABLE_ERRORS = (
    ResmemError,
    ValidationError,
    np.linalg.LinAlgError,
    FloatingPointError,
    RuntimeError,
)


@dataclass(frozen=True)
class GridPoint:
    index: int
    g: float
    epsilon: float
    eta_f: float
    d_e: int
    narma_order: int
    rho: float
    seed: int

    def params(self) -> Dict[str, float]:
        values = asdict(self)
        values.pop("index")
        return values


def sub_seeds(seed: int) -> Tuple[int, int, int]:
    """Independent (adjacency, train, test) seeds derived from one experiment seed."""
    adjacency, train, test = np.random.SeedSequence(seed).generate_state(3)
    return int(adjacency), int(train), int(test)


@lru_cache(maxsize=256)
def _adjacency(M: int, eta_f: float, seed: int) -> AdjacencyMatrix:
    return make_adjacency(M, eta_f, 1.0, seed)


@lru_cache(maxsize=64)
def _signals(driver: str, n: int, seed: int, narma_order: int) -> Tuple[TimeSeries, TimeSeries]:
    """(input, target) pair of length ``n``."""
    if driver == "lorenz":
        x, _, z = integrate_lorenz(OdeParams.lorenz(), n, seed)
        return x, z
    if driver == "rossler":
        x, _, z = integrate_rossler(OdeParams.rossler(), n, seed)
        return x, z
    if driver == "narma":
        return narma_generate(NarmaParams(order=narma_order), n, seed)
    if driver == "noise":
        s = gaussian_noise(n, seed)
        return s, s
    raise InvalidInputError(f"driver {driver!r} provides no signal")


class PointEvaluator:
    """
    Lazily builds the reservoir, network and signals one grid point needs.

    Args:
        spec: The sweep being run
        point: Parameter values and seed for this point
    """

    def __init__(self, spec: SweepSpec, point: GridPoint):
        self.spec = spec
        self.point = point
        self.adjacency_seed, self.train_seed, self.test_seed = sub_seeds(point.seed)

    @cached_property
    def config(self) -> ReservoirConfig:
        return ReservoirConfig(
            M=self.spec.M,
            g=self.point.g,
            epsilon=self.point.epsilon,
            d_e=self.point.d_e,
            delay_feedback=self.spec.delay_feedback,
            node_type=self.spec.node_type,
            washout=self.spec.washout,
            n_fit=self.spec.n_fit,
        )

    @cached_property
    def base_adjacency(self) -> AdjacencyMatrix:
        """Adjacency normalized to spectral radius 1, shared by all points with this seed."""
        return _adjacency(self.spec.M, self.point.eta_f, self.adjacency_seed)

    @cached_property
    def rho(self) -> float:
        if self.spec.target_LW is None:
            return self.point.rho
        return calibrate_spectral_radius(self.base_adjacency, self.spec.target_LW)

    @cached_property
    def adjacency(self) -> AdjacencyMatrix:
        return rescale_spectral_radius(self.base_adjacency, self.rho)

    def row_rho(self) -> float:
        try:
            return self.rho
        except RECOVERABLE_ERRORS:
            return float("nan")

    def signals(self, seed: int, length: Optional[int] = None) -> Tuple[TimeSeries, TimeSeries]:
        n = self.spec.washout + self.spec.n_fit if length is None else length
        return _signals(self.spec.driver, n, seed, self.point.narma_order)

    def measure(self, metric: str) -> List[Measurement]:
        """
        Evaluate one metric.

        Args:
            metric: One of the metric names accepted by ``SweepSpec.metrics``

        Returns:
            Measurements in a fixed order
        """
        return self._handlers()[metric]()

    def _handlers(self) -> Dict[str, Callable[[], List[Measurement]]]:
        return {
            "train_test": self._train_test,
            "memory_capacity": self._memory_capacity,
            "memory_curve": self._memory_curve,
            "delay_capacity": self._delay_capacity,
            "delay_trace": self._delay_trace,
            "norm_of_variation": self._norm_of_variation,
            "variation_curve": self._variation_curve,
            "nonlinear_index": self._nonlinear_index,
            "lyapunov": self._lyapunov,
            "path_length": self._path_length,
            "calibrated_rho": self._calibrated_rho,
            "delay_coefficients": self._delay_coefficients,
            "autocorrelation": self._autocorrelation,
        }

    def _train_test(self) -> List[Measurement]:
        train_input, train_target = self.signals(self.train_seed)
        test_input, test_target = self.signals(self.test_seed)
        rows: List[Measurement] = []
        for mode in self.spec.fit_modes:
            result = train_test(
                self.config,
                self.adjacency,
                train_input,
                train_target,
                test_input,
                test_target,
                first_components_only=mode == "first",
            )
            rows.append(("train_error", mode, 0, result.train_error))
            rows.append(("test_error", mode, 0, result.test_error))
        return rows

    def _mc_curve(self):
        return memory_capacity_curve(
            self.config, self.adjacency, self.train_seed, tau_max=self.spec.tau_max
        )

    def _memory_capacity(self) -> List[Measurement]:
        return [("memory_capacity", "", 0, total_memory_capacity(self._mc_curve()))]

    def _memory_curve(self) -> List[Measurement]:
        curve = self._mc_curve()
        return [
            ("memory_capacity_tau", "", int(tau), float(v))
            for tau, v in zip(curve.taus, curve.values)
        ]

    def _delay(self):
        drive, _ = self.signals(self.train_seed)
        traj = drive_reservoir(self.config, self.adjacency, drive)
        return delay_capacity(traj, tau_max=self.spec.tau_max)

    def _delay_capacity(self) -> List[Measurement]:
        return [("delay_capacity", "", 0, self._delay().theta_d)]

    def _delay_trace(self) -> List[Measurement]:
        curve = self._delay().curve
        return [("delay_trace", "", int(tau), float(v)) for tau, v in zip(curve.taus, curve.values)]

    def _variation(self):
        drive, _ = self.signals(self.train_seed)
        return norm_of_variation(
            self.config,
            self.adjacency,
            drive,
            tau_max=self.spec.tau_max,
            n_samples=self.spec.variation_samples,
            seed=self.train_seed,
        )

    def _norm_of_variation(self) -> List[Measurement]:
        return [("norm_of_variation", "", 0, self._variation().d_var)]

    def _variation_curve(self) -> List[Measurement]:
        norms = self._variation().mean_norms
        return [("variation_norm", "", n, float(v)) for n, v in enumerate(norms)]

    def _nonlinear_index(self) -> List[Measurement]:
        gamma = nonlinear_index(
            self.config,
            self.adjacency,
            n_probes=self.spec.n_probes,
            probe_length=self.spec.probe_length,
        )
        return [("nonlinear_index", "", 0, gamma)]

    def _lyapunov(self) -> List[Measurement]:
        steps = self.spec.lyapunov_steps
        drive, _ = self.signals(self.train_seed, self.spec.washout + steps)
        result = lyapunov_spectrum(
            self.config, self.adjacency, drive, LyapunovSpec(n_steps=steps), seed=self.train_seed
        )
        return [("lyapunov", "", 0, result.largest)]

    def _path_length(self) -> List[Measurement]:
        report = path_length_report(self.adjacency)
        return [
            ("mean_unweighted_path_length", "", 0, report.mean_unweighted),
            ("mean_weighted_path_length", "", 0, report.mean_weighted),
            ("unreachable_pairs", "", 0, float(report.unreachable_pairs)),
        ]

    def _calibrated_rho(self) -> List[Measurement]:
        return [("spectral_radius", "", 0, self.rho)]

    def _delay_coefficients(self) -> List[Measurement]:
        coefficients = linear_delay_coefficients(self.base_adjacency, self.rho)
        return [("delay_coefficient", "", j + 1, float(b)) for j, b in enumerate(coefficients.means)]

    def _autocorrelation(self) -> List[Measurement]:
        drive, _ = self.signals(self.train_seed)
        values = autocorrelation(drive, self.spec.autocorrelation_lags)
        return [("autocorrelation", "", lag, float(v)) for lag, v in enumerate(values)]


def _row(spec: SweepSpec, point: GridPoint, rho: float, measurement: Measurement) -> MetricRow:
    metric, variant, index, value = measurement
    return MetricRow(
        experiment=spec.experiment,
        metric=metric,
        variant=variant,
        tau_or_index=index,
        value=value,
        g=point.g,
        epsilon=point.epsilon,
        eta_f=point.eta_f,
        d_e=point.d_e,
        narma_order=point.narma_order,
        rho=rho,
        seed=point.seed,
    )


def evaluate_point(spec: SweepSpec, point: GridPoint) -> GridPointResult:
    """
    Evaluate every requested metric at one grid point.

    A failing metric becomes an error row; the other metrics still run.
    """
    start = time.perf_counter()
    evaluator = PointEvaluator(spec, point)
    rows: List[MetricRow] = []
    for metric in spec.metrics:
        try:
            measurements = evaluator.measure(metric)
        except RECOVERABLE_ERRORS as e:
            logger.warning("point %d, %s failed: %s", point.index, metric, e)
            error_row = _row(spec, point, evaluator.row_rho(), (metric, "", 0, float("nan")))
            rows.append(error_row.model_copy(update={"status": "error", "error": str(e)}))
            continue
        rho = evaluator.row_rho()
        rows.extend(_row(spec, point, rho, m) for m in measurements)
    return GridPointResult(
        index=point.index, rows=rows, wall_time_seconds=time.perf_counter() - start
    )


class SweepRunner:
    """
    Runs a sweep over the Cartesian product of its grid.

    Args:
        spec: Sweep definition
        workers: Worker processes; defaults to ``settings.workers``
    """

    def __init__(self, spec: SweepSpec, workers: Optional[int] = None):
        self.spec = spec
        self.workers = settings.workers if workers is None else max(1, workers)

    def grid_points(self) -> List[GridPoint]:
        """All grid points in a fixed order; ``index`` is the merge key."""
        grid = self.spec.grid
        product = itertools.product(
            grid.eta_f, grid.g, grid.epsilon, grid.d_e, grid.narma_order, grid.rho, grid.seeds
        )
        return [GridPoint(i, *values) for i, values in enumerate(product)]

    def _evaluate(self, points: List[GridPoint]) -> List[GridPointResult]:
        if self.workers == 1 or len(points) == 1:
            results = []
            for n, point in enumerate(points, start=1):
                results.append(evaluate_point(self.spec, point))
                logger.info("[%d/%d] %s", n, len(points), point.params())
            return results

        # joblib returns results in submission order
        pooled = Parallel(n_jobs=self.workers, prefer="processes")(
            delayed(evaluate_point)(self.spec, point) for point in points
        )
        logger.info("[%d/%d] done", len(points), len(points))
        return list(pooled)

    def run(self) -> MetricReport:
        """
        Evaluate the grid and merge the results by grid index.

        Returns:
            The report with one row group per grid point and a summary per point
        """
        points = self.grid_points()
        logger.info(
            "Running %s: %d points, %d worker(s)", self.spec.experiment, len(points), self.workers
        )
        results = sorted(self._evaluate(points), key=lambda r: r.index)

        report = MetricReport(
            experiment=self.spec.experiment,
            version=settings.version,
            spec=self.spec.model_dump(mode="json"),
            calibrated=self.spec.target_LW is not None,
        )
        for point, result in zip(points, results):
            report.rows.extend(result.rows)
            report.points.append(result.summary(point.params()))

        if report.n_errors:
            logger.warning("%s finished with %d error rows", self.spec.experiment, report.n_errors)
        return report


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> MetricReport:
    """Run ``spec`` and return its report."""
    return SweepRunner(spec, workers).run()
