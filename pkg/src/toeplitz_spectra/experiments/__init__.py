from .compare import ComparisonReport, compare_to_reference
from .config import EnsembleKind, ExperimentConfig, Preset, StatisticsParams, default_config
from .runner import RunAborted, RunManifest, run_experiment

__all__ = [
    "ComparisonReport",
    "EnsembleKind",
    "ExperimentConfig",
    "Preset",
    "RunAborted",
    "RunManifest",
    "StatisticsParams",
    "compare_to_reference",
    "default_config",
    "run_experiment",
]
