"""Synthetic recordings with class-dependent band power.

Each recording sums a few random-frequency sinusoids per band per
channel, scaled by the class profile, plus white noise. Classes are told
apart by which bands carry power, which is exactly what the band-power
features measure.
"""

from __future__ import annotations

import numpy as np

from .dsp import CANONICAL_BANDS, Band
from .errors import InvalidProfile
from .recordings import DEFAULT_CHANNELS, GENDERS, LABELS, Recording

__all__ = ["DEFAULT_PROFILES", "synthesize_dataset"]

# Per-class band amplitude multipliers. The two classes trade dominance
# between theta and alpha; beta and gamma are common-mode.
DEFAULT_PROFILES: dict[str, dict[str, float]] = {
    "AD": {"theta": 3.0, "alpha": 0.5, "beta": 1.0, "gamma": 0.3},
    "HC": {"theta": 0.5, "alpha": 3.0, "beta": 1.0, "gamma": 0.3},
}

_COMPONENTS_PER_BAND = 3
_AMPLITUDE_JITTER = 0.2


def _check_profiles(profiles: dict[str, dict[str, float]], bands: tuple[Band, ...]) -> None:
    band_names = {b.name for b in bands}
    if not profiles:
        raise InvalidProfile("profiles must name at least one class")
    for label, profile in profiles.items():
        if label not in LABELS:
            raise InvalidProfile(f"unknown class label {label!r}, expected one of {LABELS}")
        missing = band_names - profile.keys()
        if missing:
            raise InvalidProfile(f"class {label}: missing amplitudes for bands {sorted(missing)}")
        for band_name, amplitude in profile.items():
            if band_name not in band_names:
                raise InvalidProfile(f"class {label}: unknown band {band_name!r}")
            if amplitude < 0:
                raise InvalidProfile(
                    f"class {label}: band {band_name} amplitude must be >= 0, got {amplitude}"
                )


def synthesize_dataset(
    n_per_class: int,
    profiles: dict[str, dict[str, float]] | None = None,
    noise_level: float = 0.1,
    sample_rate_hz: float = 250.0,
    duration_s: float = 10.0,
    seed: int = 0,
    channel_names: tuple[str, ...] = DEFAULT_CHANNELS,
    bands: tuple[Band, ...] = CANONICAL_BANDS,
) -> list[Recording]:
    """Generate ``n_per_class`` recordings per profiled class.

    Deterministic for a given seed: every recording draws from its own
    child stream, so the list is reproducible element by element.
    """
    if n_per_class < 1:
        raise ValueError(f"n_per_class must be >= 1, got {n_per_class}")
    if noise_level < 0:
        raise ValueError(f"noise_level must be >= 0, got {noise_level}")
    if sample_rate_hz <= 0 or duration_s <= 0:
        raise ValueError("sample_rate_hz and duration_s must be positive")
    if profiles is None:
        profiles = DEFAULT_PROFILES
    _check_profiles(profiles, bands)

    labels = sorted(profiles)
    n_samples = int(round(sample_rate_hz * duration_s))
    t = np.arange(n_samples) / sample_rate_hz
    streams = np.random.SeedSequence(seed).spawn(len(labels) * n_per_class)

    recordings = []
    for class_pos, label in enumerate(labels):
        profile = profiles[label]
        for i in range(n_per_class):
            rng = np.random.Generator(
                np.random.PCG64(streams[class_pos * n_per_class + i])
            )
            samples = np.empty((len(channel_names), n_samples))
            for ch in range(len(channel_names)):
                wave = np.zeros(n_samples)
                for band in bands:
                    amplitude = profile[band.name]
                    if amplitude == 0:
                        continue
                    jitter = rng.uniform(1 - _AMPLITUDE_JITTER, 1 + _AMPLITUDE_JITTER)
                    per_component = amplitude * jitter / _COMPONENTS_PER_BAND
                    freqs = rng.uniform(band.low_hz, band.high_hz, _COMPONENTS_PER_BAND)
                    phases = rng.uniform(0.0, 2 * np.pi, _COMPONENTS_PER_BAND)
                    wave += per_component * np.sin(
                        2 * np.pi * freqs[:, None] * t + phases[:, None]
                    ).sum(axis=0)
                if noise_level > 0:
                    wave += noise_level * rng.standard_normal(n_samples)
                samples[ch] = wave
            recordings.append(
                Recording(
                    subject_id=f"{label}{i:03d}",
                    label=label,
                    gender=GENDERS[i % 2],
                    age=float(round(rng.uniform(55.0, 85.0), 1)),
                    sample_rate_hz=sample_rate_hz,
                    channel_names=channel_names,
                    samples=samples,
                )
            )
    return recordings
