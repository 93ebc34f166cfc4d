"""Export sweep reports as CSV tables and JSON manifests."""

import json
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from .models import MetricReport, MetricRow
from .utils import aggregate_seeds

COLUMNS = list(MetricRow.model_fields)


class MetricsExporter:
    """Export sweep reports to CSV and JSON."""

    @staticmethod
    def to_dataframe(report: MetricReport, include_means: bool = True) -> pd.DataFrame:
        """Per-seed rows in grid order, followed by the mean-over-seed rows."""
        df = pd.DataFrame([row.model_dump() for row in report.rows], columns=COLUMNS)
        df["seed"] = df["seed"].astype("Int64")
        if include_means and not df.empty:
            means = aggregate_seeds(df, calibrated=report.calibrated)
            if not means.empty:
                df = pd.concat([df, means], ignore_index=True)
        return df

    @staticmethod
    def to_csv(report: MetricReport, output_path: str, include_means: bool = True):
        """Write RFC 4180 CSV with full float precision."""
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)

        df = MetricsExporter.to_dataframe(report, include_means)
        df.to_csv(output_file, index=False, lineterminator="\r\n")

    @staticmethod
    def manifest(report: MetricReport, csv_name: str = "") -> Dict[str, Any]:
        return {
            "experiment": report.experiment,
            "version": report.version,
            "timestamp": report.timestamp.isoformat(),
            "csv": csv_name,
            "n_rows": len(report.rows),
            "n_errors": report.n_errors,
            "spec": report.spec,
            "points": [point.model_dump() for point in report.points],
        }

    @staticmethod
    def to_json(report: MetricReport, output_path: str, csv_name: str = "", pretty: bool = True):
        """Write the manifest: spec echo, software version and per-point seed and status."""
        output_file = Path(output_path)
        output_file.parent.mkdir(parents=True, exist_ok=True)

        with open(output_file, "w") as f:
            if pretty:
                json.dump(MetricsExporter.manifest(report, csv_name), f, indent=2, default=str)
            else:
                json.dump(MetricsExporter.manifest(report, csv_name), f, default=str)

    @staticmethod
    def write(report: MetricReport, output_dir: str) -> Dict[str, Path]:
        """Write ``<experiment>.csv`` and ``<experiment>.json`` into ``output_dir``."""
        out = Path(output_dir)
        csv_path = out / f"{report.experiment}.csv"
        json_path = out / f"{report.experiment}.json"
        MetricsExporter.to_csv(report, str(csv_path))
        MetricsExporter.to_json(report, str(json_path), csv_name=csv_path.name)
        return {"csv": csv_path, "json": json_path}
