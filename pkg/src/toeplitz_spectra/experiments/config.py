"""Experiment configuration and presets.

Configs serialize to indented JSON::

    {
      "preset": "Fig1Spacings",
      "ensemble": "complex",
      "n_dim": 200,
      "realizations": 2000,
      "master_seed": 20240101,
      "worker_count": 1,
      "output_path": "runs/fig1",
      "paper_scale": false,
      "stats": {"retained_fraction": 0.6, "poly_degree": 3, ...}
    }

Missing keys fall back to the preset defaults.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum


class Preset(str, Enum):
    FIG1_SPACINGS = "Fig1Spacings"
    FIG2_RATIO_FORMFACTOR = "Fig2RatioFormfactor"
    FIG3_REAL_SPACINGS = "Fig3RealSpacings"
    FIG4_REAL_RATIO = "Fig4RealRatio"
    SUBSPECTRA = "Subspectra"
    FRACTAL_DIMENSIONS = "FractalDimensions"
    DENSITY_RHO = "DensityRho"
    VARIANCE_CHECK = "VarianceCheck"
    CUSTOM = "Custom"

    @classmethod
    def parse(cls, name: str) -> "Preset":
        key = name.replace("-", "").replace("_", "").lower()
        for p in cls:
            if p.value.lower() == key or p.name.replace("_", "").lower() == key:
                return p
        raise ValueError(f"unknown preset {name!r}; choose from {[p.value for p in cls]}")


class EnsembleKind(str, Enum):
    COMPLEX = "complex"
    REAL = "real"
    SUB_PLUS = "sub-plus"
    SUB_MINUS = "sub-minus"
    FOURIER = "fourier"


@dataclass(frozen=True)
class StatisticsParams:
    retained_fraction: float = 0.6
    poly_degree: int = 3
    spacing_orders: tuple = (0, 1, 2)
    spacing_bin_width: float = 0.1
    spacing_max: float = 4.0
    ratio_bin_width: float = 0.1
    ratio_max: float = 5.0
    tau_step: float = 0.02
    tau_max: float = 3.0
    density_bin_width: float = 0.1
    qs: tuple = (0.5, 1.5, 2.0)
    fractal_sizes: tuple = (128, 256, 512, 1024)

    def __post_init__(self):
        if not 0 < self.retained_fraction <= 1:
            raise ValueError("retained_fraction must lie in (0, 1]")
        for name in ("spacing_orders", "qs", "fractal_sizes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class ExperimentConfig:
    preset: Preset = Preset.CUSTOM
    ensemble: EnsembleKind = EnsembleKind.COMPLEX
    n_dim: int = 200
    realizations: int = 2000
    master_seed: int = 20240101
    worker_count: int = 1
    output_path: str = "runs/out"
    paper_scale: bool = False
    stats: StatisticsParams = field(default_factory=StatisticsParams)

    def __post_init__(self):
        if not isinstance(self.preset, Preset):
            object.__setattr__(self, "preset", Preset.parse(str(self.preset)))
        object.__setattr__(self, "ensemble", EnsembleKind(self.ensemble))
        if self.n_dim < 2:
            raise ValueError("n_dim must be >= 2")
        if self.realizations < 1:
            raise ValueError("realizations must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["preset"] = self.preset.value
        d["ensemble"] = self.ensemble.value
        d["stats"] = {k: list(v) if isinstance(v, tuple) else v for k, v in d["stats"].items()}
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        preset = Preset.parse(data.get("preset", Preset.CUSTOM.value))
        base = default_config(preset)
        stats = data.pop("stats", None) or {}
        unknown = set(stats) - {f.name for f in fields(StatisticsParams)}
        if unknown:
            raise ValueError(f"unknown stats keys: {sorted(unknown)}")
        data["stats"] = replace(base.stats, **stats)
        data["preset"] = preset
        return replace(base, **data)

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


_PRESET_DEFAULTS = {
    Preset.FIG1_SPACINGS: dict(ensemble=EnsembleKind.COMPLEX, n_dim=200, realizations=2000),
    Preset.FIG2_RATIO_FORMFACTOR: dict(ensemble=EnsembleKind.COMPLEX, n_dim=200, realizations=2000),
    Preset.FIG3_REAL_SPACINGS: dict(ensemble=EnsembleKind.REAL, n_dim=200, realizations=2000),
    Preset.FIG4_REAL_RATIO: dict(ensemble=EnsembleKind.REAL, n_dim=200, realizations=2000),
    # both half-dimension pools come from the same real symbols; n_dim is the full size
    Preset.SUBSPECTRA: dict(ensemble=EnsembleKind.REAL, n_dim=200, realizations=2000),
    Preset.FRACTAL_DIMENSIONS: dict(ensemble=EnsembleKind.COMPLEX, n_dim=1024, realizations=200),
    Preset.DENSITY_RHO: dict(ensemble=EnsembleKind.REAL, n_dim=200, realizations=500),
    # realizations is the number of symbol draws here
    Preset.VARIANCE_CHECK: dict(ensemble=EnsembleKind.COMPLEX, n_dim=32, realizations=100_000),
    Preset.CUSTOM: dict(ensemble=EnsembleKind.COMPLEX, n_dim=200, realizations=2000),
}


def default_config(preset, **overrides) -> ExperimentConfig:
    preset = Preset.parse(preset) if not isinstance(preset, Preset) else preset
    kw = dict(_PRESET_DEFAULTS[preset])
    kw.update(overrides)
    return ExperimentConfig(preset=preset, **kw)


def paper_scale_realizations(config: ExperimentConfig) -> int:
    """Realization counts of the original sweeps: 10000 at N=200, 1000 at N=1000 and for fractal sizes."""
    if config.preset is Preset.VARIANCE_CHECK:
        return config.realizations
    if config.preset is Preset.FRACTAL_DIMENSIONS:
        return 1000
    return 10_000 if config.n_dim < 1000 else 1000
