#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Algebra Configuration
Environment-driven defaults shared by the models, the axiom harness and the CLI
"""

import os
import logging
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_int(name: str, default: int) -> int:
    """Read a non-negative integer setting from the environment"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value


# Evaluation defaults
DEFAULT_TICKS = _env_int("BNA_TICKS", 16)
DEFAULT_SEED = _env_int("BNA_SEED", 0)
DEFAULT_TRIALS = _env_int("BNA_TRIALS", 100)
DEFAULT_DOMAIN_SIZE = _env_int("BNA_DOMAIN_SIZE", 2)

# Metavariable instantiation bounds
MAX_PORTS = _env_int("BNA_MAX_PORTS", 3)
MAX_OPS = _env_int("BNA_MAX_OPS", 7)

# Logging
LOG_LEVEL = os.getenv("BNA_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# MLflow run tracking (only used by `axioms --track`)
MLFLOW_TRACKING_URI = os.getenv(
    "MLFLOW_TRACKING_URI", f"sqlite:///{Path('mlflow_data')}/mlflow.db"
)
EXPERIMENT_NAME = os.getenv("BNA_EXPERIMENT", "Network Algebra Axioms")


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Configure root logging once for an entry point"""
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"BNA_LOG_LEVEL must be a logging level name, got {level!r}")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
