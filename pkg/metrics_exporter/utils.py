"""Utility functions for aggregating sweep rows."""

from typing import List, Sequence

import numpy as np
import pandas as pd

from .models import SeedStats

PARAMETER_COLUMNS = ["g", "epsilon", "eta_f", "d_e", "narma_order", "rho"]
KEY_COLUMNS = ["experiment", "metric", "variant", "tau_or_index"]


def calculate_statistics(values: Sequence[float]) -> SeedStats:
    """Calculate mean, spread and range of a list of values."""
    if len(values) == 0:
        return SeedStats(mean=0, std_dev=0, min=0, max=0, count=0)

    values_array = np.asarray(values, dtype=float)

    return SeedStats(
        mean=float(np.mean(values_array)),
        std_dev=float(np.std(values_array)),
        min=float(np.min(values_array)),
        max=float(np.max(values_array)),
        count=len(values_array),
    )


def group_columns(calibrated: bool) -> List[str]:
    """Columns identifying a grid point apart from its seed."""
    # a calibrated rho differs per seed, so it is averaged rather than grouped on
    params = [c for c in PARAMETER_COLUMNS if not (calibrated and c == "rho")]
    return KEY_COLUMNS + params


def aggregate_seeds(df: pd.DataFrame, calibrated: bool = False) -> pd.DataFrame:
    """
    Mean over seeds of every successful per-seed row.

    Returns one row per group with ``aggregate="mean"`` and an empty seed.
    """
    ok = df[(df["status"] == "ok") & (df["aggregate"] == "seed")]
    if ok.empty:
        return df.iloc[0:0].copy()

    keys = group_columns(calibrated)
    averaged = ["value", "rho"] if calibrated else ["value"]
    means = ok.groupby(keys, sort=False, dropna=False)[averaged].mean().reset_index()
    means["seed"] = pd.array([pd.NA] * len(means), dtype="Int64")
    means["aggregate"] = "mean"
    means["status"] = "ok"
    means["error"] = ""
    return means[df.columns]
