"""
Tests for metrics export.
"""

import json

import pandas as pd
import pytest

from metrics_exporter import GridPointResult, MetricReport, MetricRow, MetricsExporter
from metrics_exporter.exporters import COLUMNS
from metrics_exporter.utils import aggregate_seeds, calculate_statistics


def make_row(value, seed, **overrides) -> MetricRow:
    values = dict(
        experiment="demo",
        metric="memory_capacity",
        value=value,
        g=0.5,
        epsilon=1.0,
        eta_f=1.0,
        d_e=1,
        narma_order=10,
        rho=1.0,
        seed=seed,
    )
    values.update(overrides)
    return MetricRow(**values)


@pytest.fixture
def sample_report():
    """Two seeds at one point, plus an error row."""
    return MetricReport(
        experiment="demo",
        version="1.0.0",
        spec={"experiment": "demo"},
        rows=[
            make_row(4.0, 0),
            make_row(6.0, 1),
            make_row(float("nan"), 2, status="error", error="diverged"),
        ],
    )


class TestStatistics:
    """Test aggregation helpers."""

    def test_calculate_statistics(self):
        """Test mean, spread and range."""
        stats = calculate_statistics([1.0, 2.0, 3.0, 4.0, 5.0])
        assert stats.mean == 3.0
        assert stats.min == 1.0
        assert stats.max == 5.0
        assert stats.count == 5
        assert stats.std_dev > 0

    def test_calculate_statistics_empty(self):
        """Test empty input."""
        stats = calculate_statistics([])
        assert stats.mean == 0
        assert stats.count == 0

    def test_calibrated_rho_is_averaged(self):
        """Test a per-seed rho does not split the mean row."""
        report = MetricReport(
            experiment="demo",
            version="1.0.0",
            spec={},
            calibrated=True,
            rows=[make_row(1.0, 0, rho=0.8), make_row(3.0, 1, rho=1.2)],
        )
        df = MetricsExporter.to_dataframe(report, include_means=False)
        means = aggregate_seeds(df, calibrated=True)
        assert len(means) == 1
        assert means["value"].iloc[0] == pytest.approx(2.0)
        assert means["rho"].iloc[0] == pytest.approx(1.0)

    def test_uncalibrated_rho_is_grouped(self):
        """Test distinct fixed radii get their own mean rows."""
        report = MetricReport(
            experiment="demo",
            version="1.0.0",
            spec={},
            rows=[make_row(1.0, 0, rho=0.8), make_row(3.0, 0, rho=1.2)],
        )
        df = MetricsExporter.to_dataframe(report, include_means=False)
        assert len(aggregate_seeds(df)) == 2


class TestMetricsExporter:
    """Test CSV and JSON output."""

    def test_dataframe_has_mean_rows(self, sample_report):
        """Test means are appended and skip error rows."""
        df = MetricsExporter.to_dataframe(sample_report)
        assert list(df.columns) == COLUMNS
        assert len(df) == 4
        mean_row = df[df["aggregate"] == "mean"].iloc[0]
        assert mean_row["value"] == 5.0
        assert pd.isna(mean_row["seed"])

    def test_csv_format(self, sample_report, tmp_path):
        """Test header, CRLF line endings and row count."""
        path = tmp_path / "demo.csv"
        MetricsExporter.to_csv(sample_report, str(path))
        lines = path.read_bytes().split(b"\r\n")
        assert lines[0].decode() == ",".join(COLUMNS)
        assert len([line for line in lines if line]) == 5

    def test_csv_reads_back(self, sample_report, tmp_path):
        """Test values survive a CSV round trip."""
        path = tmp_path / "demo.csv"
        MetricsExporter.to_csv(sample_report, str(path))
        df = pd.read_csv(path)
        assert df["value"].iloc[0] == 4.0
        assert df["status"].tolist() == ["ok", "ok", "error", "ok"]

    def test_manifest(self, sample_report):
        """Test the manifest echoes the spec and counts errors."""
        manifest = MetricsExporter.manifest(sample_report, "demo.csv")
        assert manifest["version"] == "1.0.0"
        assert manifest["n_rows"] == 3
        assert manifest["n_errors"] == 1
        assert manifest["spec"] == {"experiment": "demo"}

    def test_write(self, sample_report, tmp_path):
        """Test both files are written next to each other."""
        sample_report.points.append(
            GridPointResult(index=0, rows=sample_report.rows, wall_time_seconds=0.5).summary(
                {"g": 0.5}
            )
        )
        paths = MetricsExporter.write(sample_report, str(tmp_path / "out"))
        assert paths["csv"].name == "demo.csv"
        with open(paths["json"]) as f:
            manifest = json.load(f)
        assert manifest["csv"] == "demo.csv"
        assert manifest["points"][0]["status"] == "error"
        assert manifest["points"][0]["errors"] == ["memory_capacity: diverged"]
