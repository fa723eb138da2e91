"""Monte Carlo simulator and dataset generator for noisy one- and two-qubit systems."""

from .configs import DatasetConfig, DatasetName, config_for, enumerate_configs, format_name, parse_name
from .pipeline import generate_example, simulate

__all__ = [
    "DatasetConfig",
    "DatasetName",
    "config_for",
    "enumerate_configs",
    "format_name",
    "generate_example",
    "parse_name",
    "simulate",
]

__version__ = "0.1.0"
