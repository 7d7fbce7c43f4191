"""Minimal network engine: dense and spline-edge layers, exact backprop,
softmax cross-entropy, and Adam, all in plain float64 numpy."""

from .spline import SplineGrid, bspline_basis
from .network import (
    KanConfig,
    ModelSpec,
    backward,
    cross_entropy,
    forward,
    init_params,
    param_count,
    softmax,
)
from .optim import AdamState, adam_step
from .training import TrainReport, evaluate, train
from .checkpoint import load_checkpoint, save_checkpoint
