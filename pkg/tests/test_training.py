"""Training loop: convergence on separable data, determinism, seed
stream independence, error cases."""

import numpy as np
import pytest

from eegkan.errors import InvalidEpochs
from eegkan.nn import ModelSpec, evaluate, train
from eegkan.nn.training import training_streams


def separable_data(n_per_class=30, seed=0):
    """Three well-separated Gaussian blobs in 4-D, standardized."""
    rng = np.random.default_rng(seed)
    centers = np.array(
        [
            [2.0, 0.0, -2.0, 0.0],
            [-2.0, 2.0, 0.0, 0.0],
            [0.0, -2.0, 2.0, 2.0],
        ]
    )
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(center + 0.3 * rng.standard_normal((n_per_class, 4)))
        ys.append(np.full(n_per_class, label))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    x = (x - x.mean(axis=0)) / x.std(axis=0)
    return x, y


@pytest.mark.parametrize("kind", ["ann", "kan"])
def test_separable_data_trains_to_low_loss(kind):
    x, y = separable_data()
    spec = ModelSpec(kind=kind, input_dim=4, hidden_nodes=8, output_dim=3, dropout_rate=0.0)
    params, report = train(spec, (x, y), (x, y), epochs=500, lr=0.01, seed=42)
    assert report.final_train_loss < 0.2
    assert report.final_test_accuracy == 1.0
    assert len(report.epoch_losses) == 500
    # Loss improves from start to finish.
    assert report.epoch_losses[-1] < report.epoch_losses[0]


@pytest.mark.parametrize("kind", ["ann", "kan"])
def test_training_is_bit_identical_across_reruns(kind):
    x, y = separable_data()
    spec = ModelSpec(kind=kind, input_dim=4, hidden_nodes=6, output_dim=3, dropout_rate=0.5)
    pa, ra = train(spec, (x, y), (x, y), epochs=30, lr=0.01, seed=7)
    pb, rb = train(spec, (x, y), (x, y), epochs=30, lr=0.01, seed=7)
    assert ra.epoch_losses == rb.epoch_losses
    for key in pa:
        np.testing.assert_array_equal(pa[key], pb[key])


def test_different_seeds_give_different_trajectories():
    x, y = separable_data()
    spec = ModelSpec(kind="ann", input_dim=4, hidden_nodes=6, output_dim=3, dropout_rate=0.5)
    _, ra = train(spec, (x, y), (x, y), epochs=10, lr=0.01, seed=1)
    _, rb = train(spec, (x, y), (x, y), epochs=10, lr=0.01, seed=2)
    assert ra.epoch_losses != rb.epoch_losses


def test_epochs_must_be_positive():
    x, y = separable_data(n_per_class=5)
    spec = ModelSpec(kind="ann", input_dim=4, hidden_nodes=4, output_dim=3)
    with pytest.raises(InvalidEpochs):
        train(spec, (x, y), (x, y), epochs=0, lr=0.01, seed=1)


def test_empty_train_set_raises():
    spec = ModelSpec(kind="ann", input_dim=4, hidden_nodes=4, output_dim=3)
    empty = (np.zeros((0, 4)), np.zeros(0, dtype=int))
    with pytest.raises(InvalidEpochs):
        train(spec, empty, empty, epochs=10, lr=0.01, seed=1)


def test_streams_are_independent_and_deterministic():
    a_init, a_drop = training_streams(123)
    b_init, b_drop = training_streams(123)
    np.testing.assert_array_equal(
        a_init.standard_normal(8), b_init.standard_normal(8)
    )
    np.testing.assert_array_equal(
        a_drop.standard_normal(8), b_drop.standard_normal(8)
    )
    # The two streams from one seed produce different values.
    c_init, c_drop = training_streams(123)
    assert not np.array_equal(c_init.standard_normal(8), c_drop.standard_normal(8))


def test_report_config_echoes_run_settings():
    x, y = separable_data(n_per_class=5)
    spec = ModelSpec(kind="kan", input_dim=4, hidden_nodes=4, output_dim=3, dropout_rate=0.5)
    _, report = train(spec, (x, y), (x, y), epochs=3, lr=0.001, seed=9)
    assert report.config["kind"] == "kan"
    assert report.config["epochs"] == 3
    assert report.config["lr"] == 0.001
    assert report.config["hidden_nodes"] == 4
    assert report.seed == 9
    d = report.to_dict()
    assert d["final_test_accuracy"] == report.final_test_accuracy


def test_evaluate_returns_argmax_predictions():
    x, y = separable_data()
    spec = ModelSpec(kind="ann", input_dim=4, hidden_nodes=8, output_dim=3, dropout_rate=0.0)
    params, _ = train(spec, (x, y), (x, y), epochs=300, lr=0.01, seed=3)
    loss, acc, preds = evaluate(spec, params, x, y)
    assert preds.shape == y.shape
    assert acc == np.mean(preds == y)
    assert loss >= 0.0
