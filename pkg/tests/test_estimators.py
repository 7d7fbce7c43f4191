"""sklearn protocol conformance and pipeline composition."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

from eegkan.estimators import BandPowerExtractor, NetworkClassifier
from eegkan.synthetic import synthesize_dataset


def blobs(n=30, seed=0):
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((n, 4)) * 0.4 - 1.5
    x1 = rng.standard_normal((n, 4)) * 0.4 + 1.5
    x = np.vstack([x0, x1])
    y = np.array([0] * n + [1] * n)
    return x, y


class TestNetworkClassifier:
    @pytest.mark.parametrize("kind", ["ann", "kan"])
    def test_fit_predict_separable(self, kind):
        x, y = blobs()
        clf = NetworkClassifier(kind=kind, hidden_nodes=8, epochs=200, lr=0.01,
                                dropout_rate=0.0, seed=1)
        clf.fit(x, y)
        assert clf.score(x, y) == 1.0
        assert set(clf.predict(x)) <= {0, 1, 2}

    def test_get_set_params_round_trip(self):
        clf = NetworkClassifier(kind="kan", hidden_nodes=4, lr=0.1)
        params = clf.get_params()
        assert params["kind"] == "kan"
        assert params["lr"] == 0.1
        clf2 = NetworkClassifier().set_params(**params)
        assert clf2.get_params() == params

    def test_clone_preserves_params_and_resets_state(self):
        x, y = blobs(n=10)
        clf = NetworkClassifier(epochs=5, seed=3).fit(x, y)
        cloned = clone(clf)
        assert cloned.get_params() == clf.get_params()
        with pytest.raises(NotFittedError):
            cloned.predict(x)

    def test_unfitted_predict_raises(self):
        with pytest.raises(NotFittedError):
            NetworkClassifier().predict(np.zeros((2, 4)))

    def test_predict_proba_rows_sum_to_one(self):
        x, y = blobs(n=10)
        clf = NetworkClassifier(epochs=20, seed=0).fit(x, y)
        proba = clf.predict_proba(x)
        assert proba.shape == (20, 3)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)

    def test_classes_span_output_dim(self):
        x, y = blobs(n=10)
        clf = NetworkClassifier(epochs=5).fit(x, y)
        np.testing.assert_array_equal(clf.classes_, [0, 1, 2])

    def test_label_out_of_range_rejected(self):
        x, y = blobs(n=10)
        with pytest.raises(ValueError):
            NetworkClassifier(output_dim=2, epochs=5).fit(x, y + 5)

    def test_feature_width_checked_at_predict(self):
        x, y = blobs(n=10)
        clf = NetworkClassifier(epochs=5).fit(x, y)
        with pytest.raises(ValueError):
            clf.predict(np.zeros((3, 7)))

    def test_same_seed_same_model(self):
        x, y = blobs(n=10)
        a = NetworkClassifier(epochs=20, seed=5).fit(x, y)
        b = NetworkClassifier(epochs=20, seed=5).fit(x, y)
        np.testing.assert_array_equal(a.decision_function(x), b.decision_function(x))


class TestBandPowerExtractor:
    def test_output_width(self):
        recs = synthesize_dataset(2, seed=0, duration_s=3.0)
        X = np.stack([r.samples for r in recs])
        ext = BandPowerExtractor().fit(X)
        out = ext.transform(X)
        assert out.shape == (4, 20)
        assert np.all(np.isfinite(out))

    def test_matches_functional_pipeline(self):
        from eegkan.features import extract_features
        recs = synthesize_dataset(1, seed=1, duration_s=3.0)
        X = np.stack([r.samples for r in recs])
        out = BandPowerExtractor().fit(X).transform(X)
        for i, rec in enumerate(recs):
            np.testing.assert_allclose(out[i], extract_features(rec).features,
                                       rtol=1e-12)

    def test_rejects_2d_input(self):
        with pytest.raises(ValueError):
            BandPowerExtractor().fit(np.zeros((4, 100)))

    def test_unfitted_transform_raises(self):
        with pytest.raises(NotFittedError):
            BandPowerExtractor().transform(np.zeros((1, 2, 600)))


class TestPipelineComposition:
    def test_end_to_end_pipeline_classifies_synthetic_classes(self):
        recs = synthesize_dataset(10, seed=7, duration_s=4.0)
        X = np.stack([r.samples for r in recs])
        y = np.array([0 if r.label == "AD" else 1 for r in recs])
        pipe = Pipeline([
            ("features", BandPowerExtractor()),
            ("scale", StandardScaler()),
            ("model", NetworkClassifier(kind="kan", hidden_nodes=8, epochs=200,
                                        lr=0.01, dropout_rate=0.0, seed=2)),
        ])
        pipe.fit(X, y)
        assert pipe.score(X, y) >= 0.9
