"""Experiment harness: configs, corpora, runners, reports and the CLI."""

from .config import ConfigError, ExperimentConfig, load_config
from .corpus import KINDS, generate_corpus, realize, realize_exponent
from .experiments import CLAIMS, EXPERIMENTS, build_operator, default_config, run
from .report import SCHEMA_VERSION, Report, read_csv_aggregates, report_emit

__all__ = [
    "CLAIMS",
    "ConfigError",
    "EXPERIMENTS",
    "ExperimentConfig",
    "KINDS",
    "Report",
    "SCHEMA_VERSION",
    "build_operator",
    "default_config",
    "generate_corpus",
    "load_config",
    "read_csv_aggregates",
    "realize",
    "realize_exponent",
    "report_emit",
    "run",
]
