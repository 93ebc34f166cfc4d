"""Named experiments reproducing the standard reservoir memory studies."""

from typing import Callable, Dict, List

import numpy as np

from resmem.harness.specs import SweepGrid, SweepSpec

# (g, epsilon) surfaces are log-spaced over [0.05, 2]
SURFACE_AXIS: List[float] = np.geomspace(0.05, 2.0, 20).tolist()
ETA_F_AXIS: List[float] = np.round(np.arange(0.05, 1.0001, 0.05), 2).tolist()
SPARSITY_EPSILON: List[float] = [0.1, 0.3, 0.5, 1.0, 1.5]
TARGET_LW = 2.0

MEMORY_METRICS = ["memory_capacity", "delay_capacity", "norm_of_variation"]


def _lorenz_grid() -> SweepSpec:
    return SweepSpec(
        experiment="lorenz-grid",
        description="Memory and Lorenz x->z error over the (g, epsilon) plane",
        grid=SweepGrid(g=SURFACE_AXIS, epsilon=SURFACE_AXIS),
        driver="lorenz",
        metrics=[*MEMORY_METRICS, "train_test"],
    )


def _lorenz_nonlinearity() -> SweepSpec:
    return SweepSpec(
        experiment="lorenz-nonlinearity",
        description="Nonlinear index and largest Lyapunov exponent over the (g, epsilon) plane",
        grid=SweepGrid(g=SURFACE_AXIS, epsilon=SURFACE_AXIS),
        driver="lorenz",
        metrics=["nonlinear_index", "lyapunov"],
        n_probes=20,
        lyapunov_steps=20_000,
    )


def _sparsity(driver: str, name: str) -> SweepSpec:
    return SweepSpec(
        experiment=name,
        description=f"{driver} drive versus eta_f with <L_W> fixed at {TARGET_LW}",
        grid=SweepGrid(eta_f=ETA_F_AXIS, epsilon=SPARSITY_EPSILON),
        driver=driver,  # type: ignore[arg-type]
        metrics=[*MEMORY_METRICS, "train_test"],
        target_LW=TARGET_LW,
    )


def _sparsity_uncalibrated() -> SweepSpec:
    return SweepSpec(
        experiment="sparsity-uncalibrated",
        description="Memory capacity versus eta_f with the spectral radius fixed at 1",
        grid=SweepGrid(eta_f=ETA_F_AXIS, epsilon=SPARSITY_EPSILON),
        driver="noise",
        metrics=["memory_capacity"],
    )


def _multidim_memory() -> SweepSpec:
    return SweepSpec(
        experiment="multidim-memory",
        description="Memory statistics of delay-line nodes versus node dimension",
        grid=SweepGrid(g=[0.35], epsilon=[0.5], d_e=list(range(1, 11))),
        driver="lorenz",
        node_type="multidim",
        metrics=list(MEMORY_METRICS),
    )


def _multidim_fits(driver: str, name: str) -> SweepSpec:
    return SweepSpec(
        experiment=name,
        description=f"{driver} x->z error versus node dimension, all signals and first components",
        grid=SweepGrid(g=[0.35], epsilon=[0.5], d_e=list(range(1, 13))),
        driver=driver,  # type: ignore[arg-type]
        node_type="multidim",
        metrics=["train_test"],
        fit_modes=["all", "first"],
    )


def _narma_grid() -> SweepSpec:
    return SweepSpec(
        experiment="narma-grid",
        description="NARMA error over order and node dimension",
        grid=SweepGrid(
            g=[0.35], epsilon=[0.35], d_e=list(range(1, 13)), narma_order=list(range(1, 11))
        ),
        driver="narma",
        node_type="multidim",
        metrics=["train_test"],
    )


def _network(name: str, metric: str, description: str, target_LW=None) -> SweepSpec:
    return SweepSpec(
        experiment=name,
        description=description,
        grid=SweepGrid(eta_f=ETA_F_AXIS),
        driver="none",
        metrics=[metric],  # type: ignore[list-item]
        target_LW=target_LW,
    )


def _curve(name: str, metric: str, driver: str, description: str) -> SweepSpec:
    return SweepSpec(
        experiment=name,
        description=description,
        grid=SweepGrid(epsilon=[0.1, 0.5, 1.0]),
        driver=driver,  # type: ignore[arg-type]
        metrics=[metric],  # type: ignore[list-item]
    )


def _autocorrelation(driver: str, name: str) -> SweepSpec:
    return SweepSpec(
        experiment=name,
        description=f"Autocorrelation of the {driver} x signal",
        grid=SweepGrid(seeds=[0]),
        driver=driver,  # type: ignore[arg-type]
        metrics=["autocorrelation"],
    )


PRESETS: Dict[str, Callable[[], SweepSpec]] = {
    "lorenz-grid": _lorenz_grid,
    "lorenz-nonlinearity": _lorenz_nonlinearity,
    "sparsity": lambda: _sparsity("lorenz", "sparsity"),
    "sparsity-rossler": lambda: _sparsity("rossler", "sparsity-rossler"),
    "sparsity-uncalibrated": _sparsity_uncalibrated,
    "multidim-memory": _multidim_memory,
    "multidim-fits": lambda: _multidim_fits("lorenz", "multidim-fits"),
    "multidim-fits-rossler": lambda: _multidim_fits("rossler", "multidim-fits-rossler"),
    "narma-grid": _narma_grid,
    "path-length": lambda: _network(
        "path-length", "path_length", "Mean unweighted and weighted path lengths versus eta_f"
    ),
    "spectral-radius": lambda: _network(
        "spectral-radius",
        "calibrated_rho",
        f"Spectral radius giving <L_W> = {TARGET_LW} versus eta_f",
        TARGET_LW,
    ),
    "delay-coefficients": lambda: _network(
        "delay-coefficients",
        "delay_coefficients",
        "Linear-model delay coefficients with the calibrated spectral radius",
        TARGET_LW,
    ),
    "memory-curve": lambda: _curve(
        "memory-curve", "memory_curve", "noise", "Memory capacity per delay"
    ),
    "variation-curve": lambda: _curve(
        "variation-curve", "variation_curve", "lorenz", "Perturbation norm per step"
    ),
    "delay-trace": lambda: _curve(
        "delay-trace", "delay_trace", "lorenz", "Trace of the whitened delay covariance"
    ),
    "autocorrelation": lambda: _autocorrelation("lorenz", "autocorrelation"),
    "autocorrelation-rossler": lambda: _autocorrelation("rossler", "autocorrelation-rossler"),
}


def preset_experiments() -> Dict[str, SweepSpec]:
    """Every named preset, freshly built."""
    return {name: factory() for name, factory in PRESETS.items()}


def get_preset(name: str) -> SweepSpec:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    return PRESETS[name]()
