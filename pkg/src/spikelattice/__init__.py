"""Stochastic spiking neurons on finite lattice boxes, run to extinction."""

from .campaign import CampaignSpec, CampaignSummary, fit_scaling, run_campaign
from .config import ConfigError, parse_config, resolve_config
from .engine import (
    EngineError,
    Event,
    ExtinctionRecord,
    PotentialOverflowError,
    SimulationState,
    audit,
    initialize,
    run_to_extinction,
    sample_event_time,
    step,
)
from .model import (
    HARD_THRESHOLD,
    LINEAR,
    SIGMOID,
    ActivationFunction,
    ModelError,
    NetworkGraph,
    SimulationParams,
    build_lattice,
    build_line,
    evaluate_activation,
)
from .rng import Xoshiro256, derive_run_seed
from .stats import (
    Histogram,
    LogFit,
    StatsError,
    fit_log_growth,
    histogram,
    ks_distance,
    renormalize,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationFunction",
    "CampaignSpec",
    "CampaignSummary",
    "ConfigError",
    "EngineError",
    "Event",
    "ExtinctionRecord",
    "HARD_THRESHOLD",
    "Histogram",
    "LINEAR",
    "LogFit",
    "ModelError",
    "NetworkGraph",
    "PotentialOverflowError",
    "SIGMOID",
    "SimulationParams",
    "SimulationState",
    "StatsError",
    "Xoshiro256",
    "audit",
    "build_lattice",
    "build_line",
    "derive_run_seed",
    "evaluate_activation",
    "fit_log_growth",
    "fit_scaling",
    "histogram",
    "initialize",
    "ks_distance",
    "parse_config",
    "renormalize",
    "resolve_config",
    "run_campaign",
    "run_to_extinction",
    "sample_event_time",
    "step",
    "summarize",
    "__version__",
]
