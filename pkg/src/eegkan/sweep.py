"""Hyperparameter sweep over both network kinds, plus confusion matrices.

Grid axes are sorted at construction so the row order is the
lexicographic order over (kind, epochs, lr, nodes, seed) no matter how
the grid was written or how many workers ran it.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, EmptyResult, ParseError
from .features import Dataset
from .ioutil import atomic_write_text
from .nn import ModelSpec, forward, train

__all__ = [
    "ConfusionMatrix",
    "DEFAULT_GRID",
    "SweepGrid",
    "SweepResult",
    "SweepRow",
    "best_config",
    "confusion",
    "read_sweep",
    "run_sweep",
    "write_sweep",
]

KINDS = ("ann", "kan")


@dataclass(frozen=True)
class SweepGrid:
    kinds: tuple[str, ...] = KINDS
    epochs_values: tuple[int, ...] = (100, 250, 500, 1000)
    lr_values: tuple[float, ...] = (0.0001, 0.001, 0.01, 0.1)
    nodes_values: tuple[int, ...] = (4, 16, 64, 260)
    seeds: tuple[int, ...] = (1, 2, 3)

    def __post_init__(self):
        for name in ("kinds", "epochs_values", "lr_values", "nodes_values", "seeds"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must be non-empty")
            # Sorted, duplicate-free axes make the product order canonical.
            object.__setattr__(self, name, tuple(sorted(set(values))))
        for kind in self.kinds:
            if kind not in KINDS:
                raise ValueError(f"unknown kind {kind!r}, expected one of {KINDS}")
        if any(e < 1 for e in self.epochs_values):
            raise ValueError("epochs values must be >= 1")
        if any(lr <= 0 for lr in self.lr_values):
            raise ValueError("lr values must be positive")
        if any(n < 1 for n in self.nodes_values):
            raise ValueError("nodes values must be >= 1")

    @property
    def n_rows(self) -> int:
        return (
            len(self.kinds) * len(self.epochs_values) * len(self.lr_values)
            * len(self.nodes_values) * len(self.seeds)
        )

    def points(self):
        return itertools.product(
            self.kinds, self.epochs_values, self.lr_values, self.nodes_values, self.seeds
        )


DEFAULT_GRID = SweepGrid()


@dataclass(frozen=True)
class SweepRow:
    kind: str
    epochs: int
    lr: float
    nodes: int
    seed: int
    train_loss: float
    test_loss: float
    test_accuracy: float
    wall_time_s: float
    status: str = "ok"


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def successful(self, kind: str | None = None) -> list[SweepRow]:
        return [
            r for r in self.rows
            if r.status == "ok" and (kind is None or r.kind == kind)
        ]


_WORKER: dict = {}


def _init_worker(template, train_x, train_y, test_x, test_y):
    _WORKER["template"] = template
    _WORKER["data"] = (train_x, train_y, test_x, test_y)


def _run_point(point):
    kind, epochs, lr, nodes, seed = point
    template = _WORKER["template"]
    train_x, train_y, test_x, test_y = _WORKER["data"]
    spec = replace(template, kind=kind, hidden_nodes=nodes)
    started = time.perf_counter()
    try:
        _, report = train(spec, (train_x, train_y), (test_x, test_y),
                          epochs=epochs, lr=lr, seed=seed)
        elapsed = time.perf_counter() - started
        losses = (report.final_train_loss, report.final_test_loss)
        if not all(math.isfinite(v) for v in losses):
            return SweepRow(kind, epochs, lr, nodes, seed,
                            math.nan, math.nan, math.nan, elapsed,
                            status="non-finite loss")
        return SweepRow(kind, epochs, lr, nodes, seed,
                        report.final_train_loss, report.final_test_loss,
                        report.final_test_accuracy, elapsed)
    except Exception as exc:
        elapsed = time.perf_counter() - started
        return SweepRow(kind, epochs, lr, nodes, seed,
                        math.nan, math.nan, math.nan, elapsed,
                        status=f"{type(exc).__name__}: {exc}")


def run_sweep(
    grid: SweepGrid,
    train_set: Dataset,
    test_set: Dataset,
    model_template: ModelSpec,
    jobs: int | None = None,
    progress: Callable[[SweepRow], None] | None = None,
) -> SweepResult:
    """Train one model per grid point and collect rows in canonical order.

    A run that raises or produces a non-finite loss becomes a failed row
    with the reason in ``status``; the sweep itself never aborts.
    """
    train_x, train_y = train_set.feature_matrix(), train_set.labels()
    test_x, test_y = test_set.feature_matrix(), test_set.labels()
    points = list(grid.points())
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(jobs, len(points)))

    if jobs == 1:
        _init_worker(model_template, train_x, train_y, test_x, test_y)
        rows = []
        for point in points:
            row = _run_point(point)
            rows.append(row)
            if progress is not None:
                progress(row)
    else:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_init_worker,
            initargs=(model_template, train_x, train_y, test_x, test_y),
        ) as pool:
            rows = []
            for row in pool.map(_run_point, points):
                rows.append(row)
                if progress is not None:
                    progress(row)

    order = {point: i for i, point in enumerate(points)}
    rows.sort(key=lambda r: order[(r.kind, r.epochs, r.lr, r.nodes, r.seed)])
    return SweepResult(rows=tuple(rows))


def best_config(result: SweepResult, kind: str, objective: str = "test_loss"):
    """Grid point with the lowest seed-mean objective.

    Failed rows never count. Ties go to fewer epochs, then fewer nodes,
    then smaller lr, so the choice is independent of row order.
    """
    if objective not in ("test_loss", "train_loss"):
        raise ValueError(f"objective must be test_loss or train_loss, got {objective!r}")
    rows = result.successful(kind)
    if not rows:
        raise EmptyResult(f"no successful rows of kind {kind!r}")
    by_point: dict[tuple, list[float]] = {}
    for row in rows:
        by_point.setdefault((row.epochs, row.lr, row.nodes), []).append(
            getattr(row, objective)
        )
    best = min(
        by_point.items(),
        key=lambda item: (
            float(np.mean(item[1])),
            item[0][0],  # epochs
            item[0][2],  # nodes
            item[0][1],  # lr
        ),
    )
    (epochs, lr, nodes), losses = best
    return epochs, lr, nodes, float(np.mean(losses))


@dataclass(frozen=True)
class ConfusionMatrix:
    """rows = true class, columns = predicted class."""

    counts: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        c = self.counts
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] != len(self.class_names):
            raise ValueError(f"counts shape {c.shape} does not match {self.class_names}")
        if np.any(c < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.total


def confusion(params, spec: ModelSpec, test_set: Dataset) -> ConfusionMatrix:
    """Count eval-mode argmax predictions; logit ties pick the lowest index."""
    x, y = test_set.feature_matrix(), test_set.labels()
    if x.shape[1] != spec.input_dim:
        raise DimensionMismatch(
            f"test set has {x.shape[1]} features but the model expects {spec.input_dim}"
        )
    logits, _ = forward(spec, params, x, mode="eval")
    preds = np.argmax(logits, axis=1)
    n = spec.output_dim
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (y, preds), 1)
    return ConfusionMatrix(counts=counts, class_names=test_set.class_names[:n])


_SWEEP_HEADER = [
    "kind", "epochs", "lr", "nodes", "seed",
    "train_loss", "test_loss", "test_accuracy", "wall_time_s", "status",
]


def write_sweep(path: str | os.PathLike, result: SweepResult) -> None:
    """Serialize rows to CSV.

    wall_time_s is written as 0.0: timing is environment noise and the
    file must be byte-identical across reruns of the same sweep.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_SWEEP_HEADER)
    for r in result.rows:
        writer.writerow([
            r.kind, r.epochs, repr(float(r.lr)), r.nodes, r.seed,
            repr(float(r.train_loss)), repr(float(r.test_loss)),
            repr(float(r.test_accuracy)), repr(0.0), r.status,
        ])
    atomic_write_text(path, buf.getvalue())


def read_sweep(path: str | os.PathLike) -> SweepResult:
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty sweep file") from None
        if header != _SWEEP_HEADER:
            raise ParseError(f"{path}: unexpected sweep header {header}")
        rows = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(_SWEEP_HEADER):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(_SWEEP_HEADER)} columns, "
                    f"got {len(cells)}"
                )
            try:
                rows.append(SweepRow(
                    kind=cells[0], epochs=int(cells[1]), lr=float(cells[2]),
                    nodes=int(cells[3]), seed=int(cells[4]),
                    train_loss=float(cells[5]), test_loss=float(cells[6]),
                    test_accuracy=float(cells[7]), wall_time_s=float(cells[8]),
                    status=cells[9],
                ))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed sweep row") from None
    return SweepResult(rows=tuple(rows))
