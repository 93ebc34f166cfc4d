"""
Tests for sweep specs, presets and the sweep runner.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.sparse.linalg import ArpackNoConvergence

from metrics_exporter import MetricsExporter
from resmem.harness import SweepGrid, SweepSpec, get_preset, load_spec, preset_experiments
from resmem.harness.sweep import SweepRunner, run_sweep, sub_seeds
from resmem.memory import memory_capacity_curve, total_memory_capacity
from resmem.reservoir import ReservoirConfig, make_adjacency


def tiny_spec(**overrides) -> SweepSpec:
    values = dict(
        experiment="tiny",
        grid=SweepGrid(g=[0.9], epsilon=[0.5], seeds=[3]),
        driver="noise",
        metrics=["memory_capacity"],
        M=10,
        washout=200,
        n_fit=2000,
        tau_max=20,
    )
    values.update(overrides)
    return SweepSpec(**values)


class TestSpecs:
    """Test sweep definitions."""

    def test_grid_size(self):
        """Test the size is the product of the list lengths."""
        grid = SweepGrid(g=[0.1, 0.2], epsilon=[1.0, 2.0, 3.0], seeds=[0, 1])
        assert grid.size == 12

    @pytest.mark.parametrize(
        "kwargs",
        [{"eta_f": [0.0]}, {"eta_f": [1.5]}, {"g": []}, {"d_e": [0]}, {"rho": [-1.0]}],
    )
    def test_invalid_grid(self, kwargs):
        """Test out-of-range grid values are rejected."""
        with pytest.raises(ValidationError):
            SweepGrid(**kwargs)

    def test_unknown_metric(self):
        """Test metric names are checked."""
        with pytest.raises(ValidationError):
            tiny_spec(metrics=["bogus"])

    def test_with_seeds(self):
        """Test overriding seeds keeps the rest of the grid."""
        spec = tiny_spec().with_seeds([7, 8])
        assert spec.grid.seeds == [7, 8]
        assert spec.grid.g == [0.9]

    def test_load_spec(self, tmp_path):
        """Test a TOML sweep file."""
        path = tmp_path / "sweep.toml"
        path.write_text(
            'experiment = "from-file"\n'
            'driver = "noise"\n'
            'metrics = ["memory_capacity", "path_length"]\n'
            "M = 10\n"
            "\n"
            "[grid]\n"
            "g = [0.5, 0.9]\n"
            "seeds = [1]\n"
        )
        spec = load_spec(path)
        assert spec.experiment == "from-file"
        assert spec.grid.g == [0.5, 0.9]
        assert spec.grid.size == 2
        assert spec.metrics == ["memory_capacity", "path_length"]


class TestPresets:
    """Test the named experiments."""

    def test_all_presets_build(self):
        """Test every preset validates."""
        presets = preset_experiments()
        assert "lorenz-grid" in presets and "narma-grid" in presets
        for name, spec in presets.items():
            assert spec.experiment == name

    def test_surface_size(self):
        """Test the (g, epsilon) surface has 20 x 20 points per seed."""
        spec = get_preset("lorenz-grid")
        assert spec.grid.size == 20 * 20 * 4
        assert spec.grid.g[0] == pytest.approx(0.05)
        assert spec.grid.g[-1] == pytest.approx(2.0)

    def test_sparsity_is_calibrated(self):
        """Test the sparsity sweep fixes the weighted path length."""
        spec = get_preset("sparsity")
        assert spec.target_LW == 2.0
        assert spec.grid.eta_f[0] == 0.05 and spec.grid.eta_f[-1] == 1.0

    def test_narma_grid(self):
        """Test NARMA sweeps order and node dimension."""
        spec = get_preset("narma-grid")
        assert spec.node_type == "multidim"
        assert spec.grid.size == 12 * 10 * 4

    def test_unknown_preset(self):
        """Test unknown names raise KeyError."""
        with pytest.raises(KeyError):
            get_preset("nope")


class TestSweepRunner:
    """Test sweep evaluation."""

    def test_grid_order(self):
        """Test indexes follow the grid product."""
        spec = tiny_spec(grid=SweepGrid(g=[0.5, 0.9], seeds=[0, 1]))
        points = SweepRunner(spec).grid_points()
        assert [p.index for p in points] == [0, 1, 2, 3]
        assert [(p.g, p.seed) for p in points] == [(0.5, 0), (0.5, 1), (0.9, 0), (0.9, 1)]

    def test_sub_seeds_differ(self):
        """Test the derived seeds are distinct and reproducible."""
        seeds = sub_seeds(0)
        assert len(set(seeds)) == 3
        assert sub_seeds(0) == seeds

    def test_matches_direct_call(self):
        """Test a one-point sweep reproduces the library call."""
        report = run_sweep(tiny_spec(), workers=1)
        adjacency_seed, train_seed, _ = sub_seeds(3)
        A = make_adjacency(10, 1.0, 1.0, adjacency_seed)
        config = ReservoirConfig(M=10, g=0.9, epsilon=0.5, washout=200, n_fit=2000)
        expected = total_memory_capacity(memory_capacity_curve(config, A, train_seed, tau_max=20))
        assert len(report.rows) == 1
        assert report.rows[0].metric == "memory_capacity"
        assert report.rows[0].value == pytest.approx(expected, rel=1e-12)

    def test_reproducible_csv(self, tmp_path):
        """Test two runs give byte-identical CSV files."""
        spec = tiny_spec(grid=SweepGrid(g=[0.5, 0.9], epsilon=[0.5], seeds=[0, 1]))
        MetricsExporter.to_csv(run_sweep(spec), str(tmp_path / "a.csv"))
        MetricsExporter.to_csv(run_sweep(spec), str(tmp_path / "b.csv"))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_grid_order_does_not_change_values(self):
        """Test permuting a grid list only permutes the rows."""
        forward = tiny_spec(grid=SweepGrid(g=[0.5, 0.9], epsilon=[0.5], seeds=[0]))
        backward = tiny_spec(grid=SweepGrid(g=[0.9, 0.5], epsilon=[0.5], seeds=[0]))
        a = {row.g: row.value for row in run_sweep(forward).rows}
        b = {row.g: row.value for row in run_sweep(backward).rows}
        assert a == b

    def test_failure_becomes_error_row(self):
        """Test a failing metric is recorded and the others still run."""
        spec = tiny_spec(driver="none", metrics=["train_test", "path_length"])
        report = run_sweep(spec)
        errors = [row for row in report.rows if row.status == "error"]
        assert len(errors) == 1
        assert errors[0].metric == "train_test"
        assert math.isnan(errors[0].value)
        assert errors[0].error
        assert {row.metric for row in report.rows if row.status == "ok"} == {
            "mean_unweighted_path_length",
            "mean_weighted_path_length",
            "unreachable_pairs",
        }
        assert report.points[0].status == "error"

    @pytest.mark.parametrize(
        "error",
        [
            ArpackNoConvergence("ARPACK did not converge", np.empty(0), np.empty((0, 0))),
            FloatingPointError("overflow encountered in matmul"),
        ],
        ids=["arpack", "floating-point"],
    )
    def test_numerical_failure_becomes_error_row(self, monkeypatch, error):
        """Test solver and floating point failures are recorded per metric."""

        def fail(*args, **kwargs):
            raise error

        monkeypatch.setattr("resmem.harness.sweep.memory_capacity_curve", fail)
        spec = tiny_spec(driver="none", metrics=["memory_capacity", "path_length"])
        report = run_sweep(spec)
        errors = [row for row in report.rows if row.status == "error"]
        assert [row.metric for row in errors] == ["memory_capacity"]
        assert str(error) in errors[0].error
        assert any(row.metric == "mean_unweighted_path_length" for row in report.rows)

    def test_calibrated_path_length(self):
        """Test calibrated points reach the target weighted path length."""
        spec = tiny_spec(
            M=20,
            grid=SweepGrid(eta_f=[0.3], seeds=[0, 1]),
            driver="none",
            metrics=["path_length", "calibrated_rho"],
            target_LW=2.0,
        )
        report = run_sweep(spec)
        assert report.calibrated
        weighted = [row for row in report.rows if row.metric == "mean_weighted_path_length"]
        assert len(weighted) == 2
        for row in weighted:
            assert row.value == pytest.approx(2.0, abs=1e-6)
        radii = [row for row in report.rows if row.metric == "spectral_radius"]
        assert all(row.value == row.rho for row in radii)

    def test_curve_metrics_indexed(self):
        """Test per-delay metrics carry their delay."""
        report = run_sweep(tiny_spec(metrics=["memory_curve"], tau_max=5))
        assert [row.tau_or_index for row in report.rows] == [1, 2, 3, 4, 5]

    @pytest.mark.integration
    def test_workers_match_sequential(self):
        """Test the process pool gives the same rows as a sequential run."""
        spec = tiny_spec(grid=SweepGrid(g=[0.5, 0.9], epsilon=[0.5], seeds=[0, 1]))
        sequential = run_sweep(spec, workers=1)
        parallel = run_sweep(spec, workers=2)
        assert [row.value for row in sequential.rows] == [row.value for row in parallel.rows]
