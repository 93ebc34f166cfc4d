"""
Shared test fixtures and configuration.
"""

import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from resmem.reservoir import ReservoirConfig, make_adjacency  # noqa: E402


@pytest.fixture(scope="session")
def project_root_path():
    """Return project root path."""
    return Path(__file__).parent.parent


@pytest.fixture
def small_config():
    """A ten-node reservoir with short runs."""
    return ReservoirConfig(M=10, g=0.9, epsilon=0.5, washout=200, n_fit=2000)


@pytest.fixture
def small_adjacency():
    """Dense ten-node adjacency with spectral radius 1."""
    return make_adjacency(10, 1.0, 1.0, seed=7)
