"""Ordinary least squares for the loss-vs-hyperparameter analysis."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyResult, RankDeficient, TooFewRows

__all__ = ["OlsFit", "loss_regression", "ols_fit"]


@dataclass(frozen=True)
class OlsFit:
    """Least-squares solution. With an intercept it is coefficient 0."""

    coefficients: np.ndarray
    r_squared: float
    residuals: np.ndarray = field(repr=False)
    n: int
    design_columns: tuple[str, ...]

    def to_dict(self) -> dict:
        res = self.residuals
        return {
            "columns": list(self.design_columns),
            "coefficients": [float(c) for c in self.coefficients],
            "r_squared": float(self.r_squared),
            "n": self.n,
            "residuals": {
                "min": float(res.min()),
                "max": float(res.max()),
                "mean": float(res.mean()),
                "std": float(res.std()),
            },
        }


def ols_fit(
    design: np.ndarray,
    response: np.ndarray,
    with_intercept: bool = True,
    column_names: tuple[str, ...] | None = None,
) -> OlsFit:
    """Solve min ||X b - y|| by SVD and report R-squared.

    R-squared is computed about the response mean when an intercept is
    present, about zero otherwise. A constant response has SS_tot = 0;
    by convention that fit reports R-squared 0 with a warning.
    """
    x = np.asarray(design, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"design must be 1-D or 2-D, got shape {x.shape}")
    y = np.asarray(response, dtype=np.float64).ravel()
    n, k = x.shape
    if y.size != n:
        raise ValueError(f"design has {n} rows but response has {y.size}")

    if column_names is None:
        column_names = tuple(f"x{i}" for i in range(k))
    if len(column_names) != k:
        raise ValueError(f"{k} design columns but {len(column_names)} names")
    if with_intercept:
        x = np.hstack([np.ones((n, 1)), x])
        column_names = ("intercept",) + tuple(column_names)

    p = x.shape[1]
    if n <= p:
        raise TooFewRows(f"need more than {p} rows to fit {p} coefficients, got {n}")

    beta, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < p:
        raise RankDeficient(
            f"design matrix rank {rank} < {p} columns; remove collinear columns"
        )

    residuals = y - x @ beta
    ss_res = float(residuals @ residuals)
    centered = y - y.mean() if with_intercept else y
    ss_tot = float(centered @ centered)
    # ptp catches responses whose mean is one ulp off the common value,
    # where ss_tot is a meaningless ~1e-30 instead of an exact zero.
    degenerate = ss_tot == 0.0 or (with_intercept and np.ptp(y) == 0.0)
    if degenerate:
        warnings.warn("response is constant; reporting r_squared = 0", stacklevel=2)
        r_squared = 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return OlsFit(
        coefficients=beta,
        r_squared=r_squared,
        residuals=residuals,
        n=n,
        design_columns=column_names,
    )


def _standardize_column(values: np.ndarray) -> np.ndarray:
    std = values.std()
    if std == 0.0:
        return values - values.mean()
    return (values - values.mean()) / std


def loss_regression(result, kind: str, objective: str = "test_loss",
                    raw_regressors: bool = False) -> OlsFit:
    """Regress one kind's losses on its hyperparameters.

    Default design: standardized epochs, standardized log10 learning
    rate, standardized hidden nodes, plus intercept. The raw variant
    uses the three hyperparameters untransformed.
    """
    if objective not in ("test_loss", "train_loss"):
        raise ValueError(f"objective must be test_loss or train_loss, got {objective!r}")
    rows = [r for r in result.rows if r.kind == kind and r.status == "ok"]
    if not rows:
        raise EmptyResult(f"no successful rows of kind {kind!r}")
    if len(rows) < 5:
        raise TooFewRows(f"need at least 5 successful rows, got {len(rows)}")

    epochs = np.array([r.epochs for r in rows], dtype=np.float64)
    lr = np.array([r.lr for r in rows], dtype=np.float64)
    nodes = np.array([r.nodes for r in rows], dtype=np.float64)
    y = np.array([getattr(r, objective) for r in rows], dtype=np.float64)

    if raw_regressors:
        design = np.column_stack([epochs, lr, nodes])
        names = ("epochs", "lr", "nodes")
    else:
        design = np.column_stack(
            [
                _standardize_column(epochs),
                _standardize_column(np.log10(lr)),
                _standardize_column(nodes),
            ]
        )
        names = ("epochs_std", "log10_lr_std", "nodes_std")
    return ols_fit(design, y, with_intercept=True, column_names=names)
