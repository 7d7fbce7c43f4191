"""scikit-learn estimator wrappers around the pipeline and the networks.

These wrap the functional core in fit/transform/predict so the pieces
compose with sklearn Pipelines, grid search, and cloning.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .dsp import CANONICAL_BANDS, band_power, design_butterworth_bandpass, filtfilt, welch_psd
from .nn import KanConfig, ModelSpec, forward, softmax, train

__all__ = ["BandPowerExtractor", "NetworkClassifier"]


class BandPowerExtractor(BaseEstimator, TransformerMixin):
    """Turn raw multichannel signals into band-power features.

    Input is (n_subjects, n_channels, n_samples); output is
    (n_subjects, n_channels * n_bands), channel-major.
    """

    def __init__(self, sample_rate_hz=250.0, filter_order=5, filter_low_hz=0.3,
                 filter_high_hz=25.0, segment_len=256, overlap=0.5):
        self.sample_rate_hz = sample_rate_hz
        self.filter_order = filter_order
        self.filter_low_hz = filter_low_hz
        self.filter_high_hz = filter_high_hz
        self.segment_len = segment_len
        self.overlap = overlap

    def fit(self, X, y=None):
        X = self._validate(X)
        self.n_features_in_ = X.shape[1] * len(CANONICAL_BANDS)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = self._validate(X)
        filt = design_butterworth_bandpass(
            self.filter_order, self.filter_low_hz, self.filter_high_hz,
            self.sample_rate_hz,
        )
        n_subjects, n_channels, _ = X.shape
        out = np.empty((n_subjects, n_channels * len(CANONICAL_BANDS)))
        for s in range(n_subjects):
            pos = 0
            for c in range(n_channels):
                filtered = filtfilt(filt, X[s, c])
                psd = welch_psd(filtered, self.sample_rate_hz,
                                segment_len=self.segment_len,
                                overlap_frac=self.overlap)
                for band in CANONICAL_BANDS:
                    out[s, pos] = band_power(psd, band)
                    pos += 1
        return out

    @staticmethod
    def _validate(X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 3:
            raise ValueError(
                f"expected (n_subjects, n_channels, n_samples), got shape {X.shape}"
            )
        return X


class NetworkClassifier(BaseEstimator, ClassifierMixin):
    """ANN or KAN classifier over integer class indices.

    The output layer width is fixed by ``output_dim`` regardless of how
    many classes appear in ``y``, so a reserved class index stays
    addressable; ``classes_`` spans the full output range.
    """

    def __init__(self, kind="ann", hidden_nodes=16, epochs=500, lr=0.01,
                 dropout_rate=0.5, output_dim=3, seed=0,
                 grid_size=5, spline_degree=3, grid_range=(-2.0, 2.0)):
        self.kind = kind
        self.hidden_nodes = hidden_nodes
        self.epochs = epochs
        self.lr = lr
        self.dropout_rate = dropout_rate
        self.output_dim = output_dim
        self.seed = seed
        self.grid_size = grid_size
        self.spline_degree = spline_degree
        self.grid_range = grid_range

    def _spec(self, input_dim):
        return ModelSpec(
            kind=self.kind,
            input_dim=input_dim,
            hidden_nodes=self.hidden_nodes,
            output_dim=self.output_dim,
            dropout_rate=self.dropout_rate,
            kan=KanConfig(
                grid_size=self.grid_size,
                spline_degree=self.spline_degree,
                grid_range=tuple(self.grid_range),
            ),
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        y = np.asarray(y)
        if not np.issubdtype(y.dtype, np.integer):
            y_int = y.astype(np.int64)
            if not np.array_equal(y_int, y):
                raise ValueError("y must contain integer class indices")
            y = y_int
        if y.min() < 0 or y.max() >= self.output_dim:
            raise ValueError(
                f"class indices must lie in [0, {self.output_dim}), "
                f"got range [{y.min()}, {y.max()}]"
            )
        spec = self._spec(X.shape[1])
        self.params_, self.report_ = train(
            spec, (X, y), (X, y), epochs=self.epochs, lr=self.lr, seed=self.seed
        )
        self.spec_ = spec
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.arange(self.output_dim)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        logits, _ = forward(self.spec_, self.params_, X, mode="eval")
        return logits

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        return np.argmax(self.decision_function(X), axis=1)
