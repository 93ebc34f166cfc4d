import logging
from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


class GlobalConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="RESMEM_")

    title: str = "resmem"
    version: str = "1.0.0"
    description: str = "Memory statistics and experiment sweeps for tanh reservoir computers"
    log_format: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"
    logging_level: int = logging.INFO

    workers: int = 1
    output_dir: str = "results"
    default_seeds: List[int] = [0, 1, 2, 3]

    # lambda = ridge_relative_lambda * trace(Omega^T Omega) / columns
    ridge_relative_lambda: float = 1e-8
    l_reg: float = 1e-10
    tau_max: int = 100
    lyapunov_report_every: int = 1000


settings = GlobalConfig()
