"""Digital signal processing for EEG band-power features.

Band-pass Butterworth design (second-order sections), zero-phase
forward-backward filtering, Welch PSD estimation, and band-power
summarization. All arithmetic is 64-bit: the 0.3 Hz edge at typical EEG
sample rates is too ill-conditioned for float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import DesignError, EmptyBand, InvalidSegmentation, SignalTooShort

__all__ = [
    "Band",
    "CANONICAL_BANDS",
    "IirFilter",
    "PsdEstimate",
    "band_power",
    "design_butterworth_bandpass",
    "filtfilt",
    "frequency_response",
    "welch_psd",
]


@dataclass(frozen=True)
class Band:
    """Half-open frequency band [low_hz, high_hz)."""

    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if not self.low_hz < self.high_hz:
            raise DesignError(f"band {self.name}: low {self.low_hz} must be < high {self.high_hz}")


# Canonical EEG bands. Half-open edges: 8 Hz belongs to alpha, not theta.
# The gamma upper edge is fixed at 45 Hz to keep the integral bounded and to
# stay below 50/60 Hz mains interference.
CANONICAL_BANDS = (
    Band("theta", 4.0, 8.0),
    Band("alpha", 8.0, 13.0),
    Band("beta", 13.0, 30.0),
    Band("gamma", 30.0, 45.0),
)


@dataclass(frozen=True)
class IirFilter:
    """Cascade of second-order sections, a0 normalized to 1.

    ``sections`` has shape (n_sections, 5): columns b0, b1, b2, a1, a2.
    """

    sections: np.ndarray
    sample_rate_hz: float
    order: int
    low_hz: float
    high_hz: float

    @property
    def n_sections(self) -> int:
        return self.sections.shape[0]

    @property
    def sos(self) -> np.ndarray:
        """scipy-layout sections (b0, b1, b2, a0=1, a1, a2)."""
        b = self.sections[:, :3]
        a = np.hstack([np.ones((self.n_sections, 1)), self.sections[:, 3:]])
        return np.hstack([b, a])

    def pole_magnitudes(self) -> np.ndarray:
        """Magnitude of every pole, section by section."""
        mags = []
        for a1, a2 in self.sections[:, 3:]:
            mags.extend(np.abs(np.roots([1.0, a1, a2])))
        return np.asarray(mags)

    @property
    def pad_len(self) -> int:
        """Edge extension length used by zero-phase filtering (per side)."""
        return 3 * 2 * self.n_sections


@dataclass(frozen=True)
class PsdEstimate:
    """One-sided power spectral density over a uniform frequency grid."""

    freqs_hz: np.ndarray
    power: np.ndarray
    resolution_hz: float

    def total_power(self) -> float:
        """Integral of the density over frequency (approximates variance)."""
        return float(np.sum(self.power) * self.resolution_hz)


def design_butterworth_bandpass(
    order: int, low_hz: float, high_hz: float, sample_rate_hz: float
) -> IirFilter:
    """Design a digital Butterworth band-pass as cascaded biquads.

    The analog prototype is mapped through the pre-warped bilinear
    transform, so the magnitude response is exactly 1/sqrt(2) at both
    cutoffs. An analog order-N band-pass doubles to digital order 2N,
    realized as N second-order sections.

    Raises DesignError when order < 1 or the cutoffs are not strictly
    inside (0, Nyquist) in increasing order.
    """
    if order < 1:
        raise DesignError(f"order must be >= 1, got {order}")
    nyquist = sample_rate_hz / 2.0
    if not (0.0 < low_hz < high_hz < nyquist):
        raise DesignError(
            f"cutoffs must satisfy 0 < low < high < Nyquist; "
            f"got low={low_hz}, high={high_hz}, Nyquist={nyquist}"
        )
    sos = sps.butter(order, [low_hz, high_hz], btype="bandpass", fs=sample_rate_hz, output="sos")
    sos = np.asarray(sos, dtype=np.float64)
    sections = np.hstack([sos[:, :3], sos[:, 4:]])
    filt = IirFilter(
        sections=sections,
        sample_rate_hz=float(sample_rate_hz),
        order=int(order),
        low_hz=float(low_hz),
        high_hz=float(high_hz),
    )
    if not np.all(filt.pole_magnitudes() < 1.0):
        raise DesignError("designed filter is unstable (pole on or outside unit circle)")
    return filt


def frequency_response(filt: IirFilter, freqs_hz: np.ndarray) -> np.ndarray:
    """Complex response of the single-pass filter at the given frequencies."""
    freqs_hz = np.atleast_1d(np.asarray(freqs_hz, dtype=np.float64))
    _, h = sps.sosfreqz(filt.sos, worN=2.0 * np.pi * freqs_hz / filt.sample_rate_hz)
    return h


def filtfilt(filt: IirFilter, x) -> np.ndarray:
    """Zero-phase forward-backward filtering.

    The signal is extended on both sides by ``filt.pad_len`` samples of its
    odd-symmetric reflection, and the filter state is initialized to the
    extension's first-sample steady state. Output length equals input
    length; the effective magnitude response is |H|^2 with zero net phase.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise SignalTooShort(f"expected a 1-D signal, got shape {x.shape}")
    if x.size <= filt.pad_len:
        raise SignalTooShort(
            f"signal of {x.size} samples is too short for edge padding of "
            f"{filt.pad_len} samples per side"
        )
    return sps.sosfiltfilt(filt.sos, x, padtype="odd", padlen=filt.pad_len)


def welch_psd(
    x,
    sample_rate_hz: float,
    segment_len: int = 256,
    overlap_frac: float = 0.5,
    window: str = "hann",
) -> PsdEstimate:
    """Welch averaged-periodogram PSD, one-sided density scaling.

    Windowed overlapping segments are averaged so that the integral of the
    density over frequency approximates the signal variance (window-power
    corrected). Only the Hann window is supported.
    """
    x = np.asarray(x, dtype=np.float64)
    if window != "hann":
        raise InvalidSegmentation(f"unsupported window {window!r}; only 'hann' is available")
    if segment_len < 8:
        raise InvalidSegmentation(f"segment_len must be >= 8, got {segment_len}")
    if segment_len > x.size:
        raise InvalidSegmentation(
            f"segment_len {segment_len} exceeds signal length {x.size}"
        )
    if not 0.0 <= overlap_frac < 1.0:
        raise InvalidSegmentation(f"overlap_frac must be in [0, 1), got {overlap_frac}")
    noverlap = int(segment_len * overlap_frac)
    freqs, power = sps.welch(
        x,
        fs=sample_rate_hz,
        window="hann",
        nperseg=segment_len,
        noverlap=noverlap,
        detrend="constant",
        scaling="density",
        return_onesided=True,
    )
    return PsdEstimate(
        freqs_hz=freqs,
        power=power,
        resolution_hz=float(sample_rate_hz) / float(segment_len),
    )


def band_power(psd: PsdEstimate, band: Band) -> float:
    """Mean of the PSD bins with band.low_hz <= f < band.high_hz."""
    if band.low_hz >= psd.freqs_hz[-1] or band.high_hz <= psd.freqs_hz[0]:
        raise EmptyBand(
            f"band {band.name} [{band.low_hz}, {band.high_hz}) lies outside "
            f"the PSD range [{psd.freqs_hz[0]}, {psd.freqs_hz[-1]}]"
        )
    mask = (psd.freqs_hz >= band.low_hz) & (psd.freqs_hz < band.high_hz)
    if not np.any(mask):
        raise EmptyBand(
            f"no PSD bins inside band {band.name} [{band.low_hz}, {band.high_hz})"
        )
    return float(np.mean(psd.power[mask]))
