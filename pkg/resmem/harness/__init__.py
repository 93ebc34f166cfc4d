"""Seeded experiment sweeps over reservoir parameters."""

from resmem.harness.presets import get_preset, preset_experiments
from resmem.harness.specs import SweepGrid, SweepSpec, load_spec
from resmem.harness.sweep import SweepRunner, run_sweep

__all__ = [
    "SweepGrid",
    "SweepRunner",
    "SweepSpec",
    "get_preset",
    "load_spec",
    "preset_experiments",
    "run_sweep",
]
