"""Metrics Exporter Module - sweep result models and CSV/JSON export."""

from .exporters import MetricsExporter
from .models import GridPointResult, MetricReport, MetricRow, PointSummary

__all__ = [
    "GridPointResult",
    "MetricReport",
    "MetricRow",
    "MetricsExporter",
    "PointSummary",
]
