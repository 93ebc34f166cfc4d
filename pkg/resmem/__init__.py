"""Memory statistics and experiment sweeps for tanh reservoir computers."""

from resmem.core.config import settings
from resmem.core.exceptions import ResmemError

__version__ = settings.version

__all__ = ["ResmemError", "__version__", "settings"]
