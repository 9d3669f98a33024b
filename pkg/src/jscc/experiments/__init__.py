"""Configuration, exact bound evaluation, Monte Carlo simulation and sweeps."""

from .config import (
    SCHEMA,
    ExperimentConfig,
    build_instance,
    config_from_dict,
    dump_config,
    load_config,
    validate,
)
from .presets import PRESET_NAMES, preset
from .runner import (
    CSV_COLUMNS,
    ExperimentResult,
    bound_only,
    exact_error_probability,
    lemma2_bound,
    monte_carlo,
    results_to_csv,
    results_to_json,
    simulate,
    sweep,
    wilson_halfwidth,
    wilson_interval,
)

__all__ = [
    "CSV_COLUMNS",
    "PRESET_NAMES",
    "SCHEMA",
    "ExperimentConfig",
    "ExperimentResult",
    "bound_only",
    "build_instance",
    "config_from_dict",
    "dump_config",
    "exact_error_probability",
    "lemma2_bound",
    "load_config",
    "monte_carlo",
    "preset",
    "results_to_csv",
    "results_to_json",
    "simulate",
    "sweep",
    "validate",
    "wilson_halfwidth",
    "wilson_interval",
]
