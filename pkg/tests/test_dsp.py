"""Filter design, zero-phase filtering, Welch PSD, and band powers.

Frozen expected values come from an independent analytic oracle (the
Butterworth magnitude formula on the pre-warped band-pass transform),
computed before the implementation existed.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eegkan.dsp import (
    CANONICAL_BANDS,
    Band,
    PsdEstimate,
    band_power,
    design_butterworth_bandpass,
    filtfilt,
    frequency_response,
    welch_psd,
)
from eegkan.errors import DesignError, EmptyBand, InvalidSegmentation, SignalTooShort

FS = 500.0


@pytest.fixture(scope="module")
def standard_filter():
    return design_butterworth_bandpass(5, 0.3, 25.0, FS)


def analytic_bandpass_mag(f, order, low, high, fs):
    """Independent oracle: Butterworth magnitude through the pre-warped
    band-pass transform, 1/sqrt(1 + olp^(2N))."""
    warp = lambda g: 2.0 * fs * np.tan(np.pi * g / fs)
    w1, w2 = warp(low), warp(high)
    olp = (warp(f) ** 2 - w1 * w2) / ((w2 - w1) * warp(f))
    return 1.0 / np.sqrt(1.0 + olp ** (2 * order))


class TestDesign:
    def test_edge_magnitudes_are_3db_points(self, standard_filter):
        mags = np.abs(frequency_response(standard_filter, [0.3, 25.0]))
        np.testing.assert_allclose(mags, 0.7071, rtol=5e-3)

    def test_section_count_doubles_analog_order(self, standard_filter):
        assert standard_filter.n_sections == 5

    def test_all_poles_strictly_inside_unit_circle(self, standard_filter):
        assert np.all(standard_filter.pole_magnitudes() < 1.0)

    def test_stopband_bound_at_50hz(self, standard_filter):
        # Analytic oracle gives |H(50)| = 0.0262835; the frozen bound is 0.032.
        mag = float(np.abs(frequency_response(standard_filter, 50.0))[0])
        assert mag <= 0.032
        np.testing.assert_allclose(mag, 0.0262835275, rtol=1e-4)

    def test_matches_analytic_magnitude_on_grid(self, standard_filter):
        freqs = np.array([0.3, 1.0, 5.0, 10.0, 25.0, 30.0, 45.0, 50.0])
        expected = analytic_bandpass_mag(freqs, 5, 0.3, 25.0, FS)
        got = np.abs(frequency_response(standard_filter, freqs))
        np.testing.assert_allclose(got, expected, rtol=1e-6, atol=1e-12)

    def test_order1_peak_at_geometric_mean(self):
        filt = design_butterworth_bandpass(1, 4.0, 16.0, FS)
        assert filt.n_sections == 1
        center = np.sqrt(4.0 * 16.0)
        grid = np.linspace(1.0, 40.0, 2000)
        mags = np.abs(frequency_response(filt, grid))
        peak_mag = float(np.abs(frequency_response(filt, center))[0])
        # Center of the warped band-pass is within a bin of the geometric mean.
        assert peak_mag >= mags.max() * 0.9999

    def test_monotone_stopband_above_high_edge(self, standard_filter):
        freqs = np.linspace(26.0, 240.0, 500)
        mags = np.abs(frequency_response(standard_filter, freqs))
        assert np.all(np.diff(mags) <= 1e-12)

    @pytest.mark.parametrize(
        "order,low,high,fs",
        [
            (0, 0.3, 25.0, 500.0),
            (5, 25.0, 0.3, 500.0),
            (5, 0.3, 260.0, 500.0),
            (5, -1.0, 25.0, 500.0),
            (5, 0.3, 250.0, 500.0),
        ],
    )
    def test_bad_designs_raise(self, order, low, high, fs):
        with pytest.raises(DesignError):
            design_butterworth_bandpass(order, low, high, fs)


class TestFiltfilt:
    def test_passband_sine_amplitude_and_lag(self, standard_filter):
        t = np.arange(int(10 * FS)) / FS
        x = np.sin(2 * np.pi * 10.0 * t)
        y = filtfilt(standard_filter, x)
        assert y.shape == x.shape
        # Effective gain is |H(10)|^2; measure on the interior to skip edges.
        interior = slice(int(FS), -int(FS))
        gain_expected = float(np.abs(frequency_response(standard_filter, 10.0))[0]) ** 2
        amp = np.sqrt(2.0 * np.mean(y[interior] ** 2))
        np.testing.assert_allclose(amp, gain_expected, rtol=0.02)
        # Zero net phase: cross-correlation peaks at lag 0.
        lags = np.arange(-20, 21)
        xi, yi = x[interior], y[interior]
        corr = [np.dot(xi[20 + k : len(xi) - 20 + k], yi[20 : len(yi) - 20]) for k in lags]
        assert lags[int(np.argmax(corr))] == 0

    def test_dc_is_rejected(self, standard_filter):
        x = np.ones(4000)
        y = filtfilt(standard_filter, x)
        assert np.max(np.abs(y[1000:-1000])) < 1e-3

    def test_zero_in_zero_out(self, standard_filter):
        y = filtfilt(standard_filter, np.zeros(1000))
        np.testing.assert_array_equal(y, np.zeros(1000))

    def test_too_short_signal_raises(self, standard_filter):
        with pytest.raises(SignalTooShort):
            filtfilt(standard_filter, np.zeros(standard_filter.pad_len))

    @settings(max_examples=20, deadline=None)
    @given(
        a=st.floats(-3, 3, allow_nan=False),
        b=st.floats(-3, 3, allow_nan=False),
        seed=st.integers(0, 2**31 - 1),
    )
    def test_linearity(self, a, b, seed):
        filt = design_butterworth_bandpass(5, 0.3, 25.0, FS)
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(600)
        y = rng.standard_normal(600)
        lhs = filtfilt(filt, a * x + b * y)
        rhs = a * filtfilt(filt, x) + b * filtfilt(filt, y)
        scale = max(np.max(np.abs(lhs)), 1.0)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9 * scale)


class TestWelch:
    def test_white_noise_integrates_to_variance(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(2**14)
        x = (x - x.mean()) / x.std()
        psd = welch_psd(x, FS, segment_len=256, overlap_frac=0.5)
        assert abs(psd.total_power() - 1.0) < 0.1

    def test_psd_grid_and_nonnegativity(self):
        rng = np.random.default_rng(3)
        psd = welch_psd(rng.standard_normal(4096), FS)
        assert psd.freqs_hz[0] == 0.0
        assert psd.freqs_hz[-1] == FS / 2.0
        assert np.all(np.diff(psd.freqs_hz) > 0)
        assert np.all(psd.power >= 0.0)
        assert len(psd.freqs_hz) == len(psd.power)

    def test_sine_peak_location_and_total_power(self):
        amp = 2.0
        t = np.arange(2**13) / FS
        x = amp * np.sin(2 * np.pi * 10.0 * t)
        psd = welch_psd(x, FS, segment_len=256, overlap_frac=0.5)
        peak_freq = psd.freqs_hz[np.argmax(psd.power)]
        assert abs(peak_freq - 10.0) <= psd.resolution_hz
        np.testing.assert_allclose(psd.total_power(), amp**2 / 2.0, rtol=0.05)

    def test_zero_signal_gives_zero_psd(self):
        psd = welch_psd(np.zeros(1024), FS)
        np.testing.assert_array_equal(psd.power, np.zeros_like(psd.power))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(segment_len=2048),
            dict(segment_len=4),
            dict(overlap_frac=1.0),
            dict(overlap_frac=-0.1),
            dict(window="hamming"),
        ],
    )
    def test_invalid_segmentation_raises(self, kwargs):
        with pytest.raises(InvalidSegmentation):
            welch_psd(np.zeros(1024), FS, **{**dict(segment_len=256, overlap_frac=0.5), **kwargs})


class TestBandPower:
    def test_constant_psd_mean_is_constant(self):
        freqs = np.linspace(0, 250, 129)
        psd = PsdEstimate(freqs, np.ones_like(freqs), freqs[1] - freqs[0])
        for band in CANONICAL_BANDS:
            assert band_power(psd, band) == 1.0

    def test_sine_concentrates_in_alpha(self):
        t = np.arange(2**13) / FS
        psd = welch_psd(np.sin(2 * np.pi * 10.0 * t), FS)
        alpha = band_power(psd, CANONICAL_BANDS[1])
        beta = band_power(psd, CANONICAL_BANDS[2])
        assert alpha >= 10.0 * beta

    def test_white_noise_theta_matches_flat_level(self):
        # Parseval oracle: flat one-sided level = variance / (fs/2).
        rng = np.random.default_rng(11)
        x = rng.standard_normal(2**15)
        x = (x - x.mean()) / x.std()
        psd = welch_psd(x, FS, segment_len=256, overlap_frac=0.5)
        flat = 1.0 / (FS / 2.0)
        theta = band_power(psd, CANONICAL_BANDS[0])
        assert abs(theta - flat) / flat < 0.15

    def test_zero_psd_gives_exact_zero(self):
        freqs = np.linspace(0, 250, 129)
        psd = PsdEstimate(freqs, np.zeros_like(freqs), freqs[1] - freqs[0])
        assert band_power(psd, CANONICAL_BANDS[0]) == 0.0

    def test_band_outside_range_raises(self):
        freqs = np.linspace(0, 10, 11)
        psd = PsdEstimate(freqs, np.ones_like(freqs), 1.0)
        with pytest.raises(EmptyBand):
            band_power(psd, Band("gamma", 30.0, 45.0))

    def test_band_between_bins_raises(self):
        freqs = np.array([0.0, 10.0, 20.0, 30.0])
        psd = PsdEstimate(freqs, np.ones_like(freqs), 10.0)
        with pytest.raises(EmptyBand):
            band_power(psd, Band("narrow", 11.0, 19.0))

    def test_half_open_edges(self):
        # 8 Hz belongs to alpha, not theta.
        freqs = np.array([4.0, 6.0, 8.0, 10.0, 12.0])
        power = np.array([1.0, 1.0, 100.0, 100.0, 100.0])
        psd = PsdEstimate(freqs, power, 2.0)
        assert band_power(psd, Band("theta", 4.0, 8.0)) == 1.0
        assert band_power(psd, Band("alpha", 8.0, 13.0)) == 100.0
