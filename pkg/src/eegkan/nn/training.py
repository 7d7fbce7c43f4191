"""Full-batch training loop with deterministic seeding.

A seed spawns two independent PCG64 streams in a fixed order (parameter
initialization first, dropout second), so a (spec, data, epochs, lr, seed)
tuple always produces bit-identical parameters and reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidEpochs
from .network import ModelSpec, backward, cross_entropy_batch, forward, init_params
from .optim import AdamState, adam_step

__all__ = ["TrainReport", "evaluate", "train", "training_streams"]


def training_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(init_rng, dropout_rng), split deterministically from one seed."""
    init_seq, dropout_seq = np.random.SeedSequence(seed).spawn(2)
    return (
        np.random.Generator(np.random.PCG64(init_seq)),
        np.random.Generator(np.random.PCG64(dropout_seq)),
    )


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch training losses plus the final held-out evaluation."""

    epoch_losses: list[float]
    final_train_loss: float
    final_test_loss: float
    final_test_accuracy: float
    seed: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "epoch_losses": self.epoch_losses,
            "final_train_loss": self.final_train_loss,
            "final_test_loss": self.final_test_loss,
            "final_test_accuracy": self.final_test_accuracy,
            "seed": self.seed,
            "config": self.config,
        }


def evaluate(spec: ModelSpec, params: dict, x: np.ndarray, y: np.ndarray):
    """Eval-mode mean loss, accuracy, and argmax predictions.

    Logit ties go to the lowest class index.
    """
    logits, _ = forward(spec, params, x, mode="eval")
    loss, _ = cross_entropy_batch(logits, y)
    predictions = np.argmax(logits, axis=1)
    accuracy = float(np.mean(predictions == y))
    return loss, accuracy, predictions


def train(
    spec: ModelSpec,
    train_xy: tuple[np.ndarray, np.ndarray],
    test_xy: tuple[np.ndarray, np.ndarray],
    epochs: int,
    lr: float,
    seed: int,
) -> tuple[dict, TrainReport]:
    """Full-batch Adam training; returns (params, report).

    One gradient step per epoch over the whole training set, dropout active;
    the report's per-epoch loss is the mean training cross-entropy of that
    epoch's (dropout-perturbed) forward pass. Held-out metrics come from a
    dropout-free evaluation after the last epoch.
    """
    if epochs < 1:
        raise InvalidEpochs(f"epochs must be >= 1, got {epochs}")
    x_train, y_train = train_xy
    x_test, y_test = test_xy
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.intp)
    if x_train.shape[0] == 0:
        raise InvalidEpochs("training set is empty")

    init_rng, dropout_rng = training_streams(seed)
    params = init_params(spec, init_rng)
    state = AdamState.for_params(params)

    epoch_losses: list[float] = []
    for _ in range(epochs):
        logits, cache = forward(spec, params, x_train, mode="train", rng=dropout_rng)
        loss, dlogits = cross_entropy_batch(logits, y_train)
        grads = backward(spec, params, cache, dlogits)
        adam_step(params, grads, state, lr)
        epoch_losses.append(loss)

    test_loss, test_accuracy, _ = evaluate(spec, params, np.asarray(x_test, dtype=np.float64),
                                           np.asarray(y_test, dtype=np.intp))
    report = TrainReport(
        epoch_losses=epoch_losses,
        final_train_loss=epoch_losses[-1],
        final_test_loss=test_loss,
        final_test_accuracy=test_accuracy,
        seed=seed,
        config={
            "kind": spec.kind,
            "input_dim": spec.input_dim,
            "hidden_nodes": spec.hidden_nodes,
            "output_dim": spec.output_dim,
            "dropout_rate": spec.dropout_rate,
            "epochs": epochs,
            "lr": lr,
        },
    )
    return params, report
