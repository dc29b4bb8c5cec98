import os
import logging
logger = logging.getLogger("qbern")

import psutil
from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def load_qbern_env(env_file = "qbern.env") -> bool:
    """
    Load qbern environment variables from a file.

    Args:
        env_file (str, optional): The path to the .env file containing
            the qbern configuration. Defaults to "qbern.env".

    Returns:
        Bool: True if at least one qbern environment variable was set.
    """
    if not os.path.exists(env_file):
        logger.warning(
            f"Could not read any qbern environment variables from '{env_file}' "
            "as the file does not exist. "
            "Falling back to command line arguments and built-in defaults."
        )
        return False
    success = load_dotenv(env_file)
    if success:
        logger.info(f"Loaded qbern environment variables from '{env_file}'")
    else:
        logger.info(
            f"qbern environment variables parsed from '{env_file}'. "
            "No new environment variables were set."
        )
    return success


def default_workers() -> int:
    return psutil.cpu_count(logical=True) or 1


class QbernSettings(BaseSettings):
    """
    Runtime settings read from `QBERN_*` environment variables.

    `workers` bounds the parallelism of the verification suite
    (`QBERN_WORKERS`), `seed` is the default seed for identity runs,
    `verify_out` an optional default path for the JSON-lines report and
    `grid_size` the default number of evaluation points of approximation
    experiments.
    """
    model_config = SettingsConfigDict(
        env_prefix="QBERN_", env_ignore_empty=True)
    workers: int = Field(default_factory=default_workers)
    seed: int = Field(default=0)
    verify_out: str | None = Field(default=None)
    grid_size: int = Field(default=101)

    @field_validator('workers', 'grid_size')
    def must_be_positive(cls, v):
        if v < 1:
            raise ValueError("Value must be a positive integer")
        return v
