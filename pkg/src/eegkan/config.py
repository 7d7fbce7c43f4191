"""Run configuration: one JSON document, strict keys, documented defaults.

Precedence is flags > file > defaults; the merge happens in the CLI,
this module owns parsing and validation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields

from .dsp import CANONICAL_BANDS, Band
from .errors import ConfigError
from .recordings import DEFAULT_CHANNELS
from .synthetic import DEFAULT_PROFILES

__all__ = [
    "FilterSettings",
    "ModelSettings",
    "RunConfig",
    "SweepSettings",
    "SynthSettings",
    "WelchSettings",
    "load_config",
]


@dataclass(frozen=True)
class FilterSettings:
    order: int = 5
    low_hz: float = 0.3
    high_hz: float = 25.0


@dataclass(frozen=True)
class WelchSettings:
    segment_len: int = 256
    overlap: float = 0.5
    window: str = "hann"


@dataclass(frozen=True)
class ModelSettings:
    dropout_rate: float = 0.5
    output_dim: int = 3
    grid_size: int = 5
    spline_degree: int = 3
    grid_range: tuple[float, float] = (-2.0, 2.0)


@dataclass(frozen=True)
class SweepSettings:
    kinds: tuple[str, ...] = ("ann", "kan")
    epochs: tuple[int, ...] = (100, 250, 500, 1000)
    lr: tuple[float, ...] = (0.0001, 0.001, 0.01, 0.1)
    nodes: tuple[int, ...] = (4, 16, 64, 260)
    seeds: tuple[int, ...] = (1, 2, 3)


@dataclass(frozen=True)
class SynthSettings:
    n_per_class: int = 20
    noise_level: float = 0.1
    sample_rate_hz: float = 250.0
    duration_s: float = 10.0
    profiles: dict = field(default_factory=lambda: DEFAULT_PROFILES)


@dataclass(frozen=True)
class RunConfig:
    channel_names: tuple[str, ...] = DEFAULT_CHANNELS
    bands: tuple[Band, ...] = CANONICAL_BANDS
    filter: FilterSettings = field(default_factory=FilterSettings)
    welch: WelchSettings = field(default_factory=WelchSettings)
    model: ModelSettings = field(default_factory=ModelSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    synth: SynthSettings = field(default_factory=SynthSettings)
    seed: int = 0
    test_frac: float = 0.2
    with_gender: bool = False
    out_dir: str = "out"


def _check_keys(obj: dict, allowed, where: str) -> None:
    unknown = obj.keys() - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _section(raw: dict, key: str, cls, where: str):
    value = raw.get(key)
    if value is None:
        return cls()
    if not isinstance(value, dict):
        raise ConfigError(f"{where}.{key}: expected an object")
    names = [f.name for f in fields(cls)]
    _check_keys(value, names, f"{where}.{key}")
    kwargs = {}
    for f in fields(cls):
        if f.name in value:
            v = value[f.name]
            if isinstance(v, list):
                v = tuple(v)
            kwargs[f.name] = v
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key}: {exc}") from None


def _parse_bands(raw, where: str) -> tuple[Band, ...]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}: bands must be a non-empty array")
    bands = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ConfigError(f"{where}: bands[{i}] must be an object")
        _check_keys(item, ("name", "low_hz", "high_hz"), f"{where}.bands[{i}]")
        try:
            bands.append(Band(item["name"], float(item["low_hz"]), float(item["high_hz"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: bands[{i}]: {exc}") from None
    return tuple(bands)


_TOP_KEYS = (
    "channel_names", "bands", "filter", "welch", "model", "sweep", "synth",
    "seed", "test_frac", "with_gender", "out_dir",
)


def load_config(path: str | os.PathLike | None) -> RunConfig:
    """Read and validate a config file; None gives pure defaults."""
    if path is None:
        return RunConfig()
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    _check_keys(raw, _TOP_KEYS, str(path))

    kwargs = {}
    if "channel_names" in raw:
        names = raw["channel_names"]
        if (not isinstance(names, list) or not names
                or not all(isinstance(n, str) for n in names)):
            raise ConfigError(f"{path}: channel_names must be a non-empty string array")
        kwargs["channel_names"] = tuple(names)
    if "bands" in raw:
        kwargs["bands"] = _parse_bands(raw["bands"], str(path))
    kwargs["filter"] = _section(raw, "filter", FilterSettings, str(path))
    kwargs["welch"] = _section(raw, "welch", WelchSettings, str(path))
    kwargs["model"] = _section(raw, "model", ModelSettings, str(path))
    kwargs["sweep"] = _section(raw, "sweep", SweepSettings, str(path))
    kwargs["synth"] = _section(raw, "synth", SynthSettings, str(path))
    for key, kind in (("seed", int), ("test_frac", float),
                      ("with_gender", bool), ("out_dir", str)):
        if key in raw:
            value = raw[key]
            if kind in (int, float) and isinstance(value, bool):
                raise ConfigError(f"{path}: {key} must be a {kind.__name__}")
            if kind is int and not isinstance(value, int):
                raise ConfigError(f"{path}: {key} must be an integer")
            if kind is float and not isinstance(value, (int, float)):
                raise ConfigError(f"{path}: {key} must be a number")
            if kind is bool and not isinstance(value, bool):
                raise ConfigError(f"{path}: {key} must be true or false")
            if kind is str and not isinstance(value, str):
                raise ConfigError(f"{path}: {key} must be a string")
            kwargs[key] = kind(value)

    cfg = RunConfig(**kwargs)
    _validate(cfg, str(path))
    return cfg


def _validate(cfg: RunConfig, where: str) -> None:
    """Cross-check the assembled config against module preconditions."""
    f = cfg.filter
    if f.order < 1:
        raise ConfigError(f"{where}: filter.order must be >= 1")
    if not 0 < f.low_hz < f.high_hz:
        raise ConfigError(f"{where}: filter band must satisfy 0 < low < high")
    w = cfg.welch
    if w.segment_len < 8:
        raise ConfigError(f"{where}: welch.segment_len must be >= 8")
    if not 0 <= w.overlap < 1:
        raise ConfigError(f"{where}: welch.overlap must be in [0, 1)")
    if w.window != "hann":
        raise ConfigError(f"{where}: welch.window must be \"hann\"")
    m = cfg.model
    if not 0 <= m.dropout_rate < 1:
        raise ConfigError(f"{where}: model.dropout_rate must be in [0, 1)")
    if m.output_dim < 2:
        raise ConfigError(f"{where}: model.output_dim must be >= 2")
    if m.grid_size < 1 or m.spline_degree < 1:
        raise ConfigError(f"{where}: model grid_size and spline_degree must be >= 1")
    if not m.grid_range[0] < m.grid_range[1]:
        raise ConfigError(f"{where}: model.grid_range must be increasing")
    s = cfg.sweep
    if not all(s.kinds) or not set(s.kinds) <= {"ann", "kan"}:
        raise ConfigError(f"{where}: sweep.kinds must be a subset of [ann, kan]")
    if not s.epochs or any(e < 1 for e in s.epochs):
        raise ConfigError(f"{where}: sweep.epochs must be positive integers")
    if not s.lr or any(v <= 0 for v in s.lr):
        raise ConfigError(f"{where}: sweep.lr must be positive")
    if not s.nodes or any(n < 1 for n in s.nodes):
        raise ConfigError(f"{where}: sweep.nodes must be positive integers")
    if not s.seeds:
        raise ConfigError(f"{where}: sweep.seeds must be non-empty")
    sy = cfg.synth
    if sy.n_per_class < 1:
        raise ConfigError(f"{where}: synth.n_per_class must be >= 1")
    if sy.noise_level < 0:
        raise ConfigError(f"{where}: synth.noise_level must be >= 0")
    if sy.sample_rate_hz <= 0 or sy.duration_s <= 0:
        raise ConfigError(f"{where}: synth sample rate and duration must be positive")
    if not 0 < cfg.test_frac < 1:
        raise ConfigError(f"{where}: test_frac must be in (0, 1)")
    nyquist = sy.sample_rate_hz / 2
    if f.high_hz >= nyquist:
        raise ConfigError(
            f"{where}: filter.high_hz {f.high_hz} must stay below the "
            f"synth Nyquist frequency {nyquist}"
        )
