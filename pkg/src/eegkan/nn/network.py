"""Two single-hidden-layer network families with exact backprop.

The dense family ("ann") keeps fixed node activations (ReLU) and learnable
edge weights. The spline-edge family ("kan") puts a learnable univariate
function on every edge: phi(x) = base_weight * silu(x) + spline_scale *
sum_i c_i B_i(clamp(x)), with node values being plain sums of incoming
edges. Two stacked spline layers realize the inner and outer univariate
stages of the additive-composition representation.

Parameters live in an ordered dict of float64 arrays; the key order is the
documented checkpoint layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    DimensionMismatch,
    IndexOutOfRange,
    StaleCache,
)
from .spline import SplineGrid, bspline_basis

__all__ = [
    "KanConfig",
    "ModelSpec",
    "PARAM_LAYOUT",
    "backward",
    "cross_entropy",
    "cross_entropy_batch",
    "forward",
    "init_params",
    "param_count",
    "param_shapes",
    "silu",
    "softmax",
]


@dataclass(frozen=True)
class KanConfig:
    """Spline-edge settings: cubic splines on a fixed uniform grid.

    Standardized features make a fixed [-2, 2] range cover the bulk of the
    inputs; out-of-range values are clamped by the basis.
    """

    grid_size: int = 5
    spline_degree: int = 3
    grid_range: tuple[float, float] = (-2.0, 2.0)

    def __post_init__(self):
        if self.grid_size < 1:
            raise ValueError(f"grid_size must be >= 1, got {self.grid_size}")
        if self.spline_degree < 1:
            raise ValueError(f"spline_degree must be >= 1, got {self.spline_degree}")
        lo, hi = self.grid_range
        if not lo < hi:
            raise ValueError(f"grid_range must be increasing, got {self.grid_range}")

    @property
    def n_basis(self) -> int:
        return self.grid_size + self.spline_degree

    def make_grid(self) -> SplineGrid:
        lo, hi = self.grid_range
        return SplineGrid(self.grid_size, self.spline_degree, lo, hi)


@dataclass(frozen=True)
class ModelSpec:
    """Architecture description: one hidden layer of either family."""

    kind: str
    input_dim: int
    hidden_nodes: int
    output_dim: int
    dropout_rate: float = 0.5
    kan: KanConfig = field(default_factory=KanConfig)

    def __post_init__(self):
        if self.kind not in ("ann", "kan"):
            raise ValueError(f"kind must be 'ann' or 'kan', got {self.kind!r}")
        for name in ("input_dim", "hidden_nodes", "output_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")

    def grid(self) -> SplineGrid:
        return self.kan.make_grid()


def param_shapes(spec: ModelSpec) -> dict[str, tuple[int, ...]]:
    """Checkpoint layout: key order here is the serialization order."""
    d, h, o = spec.input_dim, spec.hidden_nodes, spec.output_dim
    if spec.kind == "ann":
        return {"w1": (h, d), "b1": (h,), "w2": (o, h), "b2": (o,)}
    g = spec.kan.n_basis
    return {
        "l1.coeffs": (h, d, g),
        "l1.base_weight": (h, d),
        "l1.spline_scale": (h, d),
        "l2.coeffs": (o, h, g),
        "l2.base_weight": (o, h),
        "l2.spline_scale": (o, h),
    }


PARAM_LAYOUT = {
    "ann": ("w1", "b1", "w2", "b2"),
    "kan": (
        "l1.coeffs",
        "l1.base_weight",
        "l1.spline_scale",
        "l2.coeffs",
        "l2.base_weight",
        "l2.spline_scale",
    ),
}


def param_count(spec: ModelSpec) -> int:
    d, h, o = spec.input_dim, spec.hidden_nodes, spec.output_dim
    if spec.kind == "ann":
        return h * (d + 1) + o * (h + 1)
    return (d * h + h * o) * (spec.kan.n_basis + 2)


def init_params(spec: ModelSpec, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Draw initial parameters.

    Draw order is fixed (ann: w1 then w2; kan: l1.coeffs then l2.coeffs) so
    a given generator state always produces the same model. Dense weights
    are U(-sqrt(1/fan_in), +sqrt(1/fan_in)) with zero biases; spline
    coefficients are N(0, 0.1) with unit base weights and scales.
    """
    d, h, o = spec.input_dim, spec.hidden_nodes, spec.output_dim
    if spec.kind == "ann":
        lim1 = np.sqrt(1.0 / d)
        lim2 = np.sqrt(1.0 / h)
        return {
            "w1": rng.uniform(-lim1, lim1, size=(h, d)),
            "b1": np.zeros(h),
            "w2": rng.uniform(-lim2, lim2, size=(o, h)),
            "b2": np.zeros(o),
        }
    g = spec.kan.n_basis
    return {
        "l1.coeffs": rng.normal(0.0, 0.1, size=(h, d, g)),
        "l1.base_weight": np.ones((h, d)),
        "l1.spline_scale": np.ones((h, d)),
        "l2.coeffs": rng.normal(0.0, 0.1, size=(o, h, g)),
        "l2.base_weight": np.ones((o, h)),
        "l2.spline_scale": np.ones((o, h)),
    }


def silu(x: np.ndarray) -> np.ndarray:
    return x / (1.0 + np.exp(-x))


def _silu_grad(x: np.ndarray) -> np.ndarray:
    s = 1.0 / (1.0 + np.exp(-x))
    return s * (1.0 + x * (1.0 - s))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Stable softmax along the last axis."""
    z = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def _spline_layer(x, basis_values, coeffs, base_weight, spline_scale):
    """Sum of edge functions into each output node.

    x: (n, d_in); basis_values: (n, d_in, g); coeffs: (d_out, d_in, g);
    base_weight, spline_scale: (d_out, d_in). Returns (n, d_out).
    """
    base = silu(x) @ base_weight.T
    scaled = spline_scale[:, :, None] * coeffs
    spline = np.einsum("nig,jig->nj", basis_values, scaled)
    return base + spline


def forward(spec: ModelSpec, params: dict, x, mode: str = "eval", rng=None):
    """Run the network; returns (logits, cache).

    In train mode, inverted dropout (scale by 1/(1-rate)) is applied to the
    hidden node values and the mask is cached for backward. Eval mode is a
    pure function of (params, x).
    """
    if mode not in ("train", "eval"):
        raise ValueError(f"mode must be 'train' or 'eval', got {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != spec.input_dim:
        raise DimensionMismatch(
            f"expected input width {spec.input_dim}, got shape {x.shape}"
        )
    n = x.shape[0]

    rate = spec.dropout_rate
    if mode == "train" and rate > 0.0:
        if rng is None:
            raise ValueError("train-mode forward with dropout needs an rng")
        keep = rng.random((n, spec.hidden_nodes)) >= rate
        mask = keep.astype(np.float64) / (1.0 - rate)
    else:
        mask = np.ones((n, spec.hidden_nodes))

    cache = {"kind": spec.kind, "mode": mode, "x": x, "mask": mask, "single": single}

    if spec.kind == "ann":
        z1 = x @ params["w1"].T + params["b1"]
        a1 = np.maximum(z1, 0.0)
        hidden = a1 * mask
        logits = hidden @ params["w2"].T + params["b2"]
        cache.update(z1=z1, hidden=hidden)
    else:
        grid = spec.grid()
        b1 = bspline_basis(grid, x)
        u = _spline_layer(x, b1, params["l1.coeffs"], params["l1.base_weight"],
                          params["l1.spline_scale"])
        hidden = u * mask
        b2, b2_deriv = bspline_basis(grid, hidden, with_deriv=True)
        logits = _spline_layer(hidden, b2, params["l2.coeffs"], params["l2.base_weight"],
                               params["l2.spline_scale"])
        cache.update(b1=b1, hidden=hidden, b2=b2, b2_deriv=b2_deriv)

    return (logits[0] if single else logits), cache


def cross_entropy(logits, label_index: int):
    """Softmax cross-entropy of one sample: (loss, dloss/dlogits).

    loss = -log softmax(logits)[label]; the gradient is
    softmax(logits) - onehot(label). Uses max-subtraction stabilization.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= label_index < logits.shape[-1]:
        raise IndexOutOfRange(
            f"label {label_index} outside logits of length {logits.shape[-1]}"
        )
    z = logits - np.max(logits)
    log_probs = z - np.log(np.sum(np.exp(z)))
    loss = -log_probs[label_index]
    dlogits = np.exp(log_probs)
    dlogits[label_index] -= 1.0
    return float(loss), dlogits


def cross_entropy_batch(logits: np.ndarray, labels: np.ndarray):
    """Mean softmax cross-entropy over a batch: (loss, dloss/dlogits).

    The returned gradient already includes the 1/n of the mean.
    """
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    n, k = logits.shape
    if np.any(labels < 0) or np.any(labels >= k):
        raise IndexOutOfRange(f"labels outside [0, {k})")
    z = logits - np.max(logits, axis=1, keepdims=True)
    log_probs = z - np.log(np.sum(np.exp(z), axis=1, keepdims=True))
    loss = -np.mean(log_probs[np.arange(n), labels])
    dlogits = np.exp(log_probs)
    dlogits[np.arange(n), labels] -= 1.0
    return float(loss), dlogits / n


def backward(spec: ModelSpec, params: dict, cache: dict, dlogits) -> dict:
    """Exact gradients of the loss w.r.t. every parameter.

    ``dlogits`` is the upstream gradient from the loss; the cached dropout
    mask is reused so the same stochastic path is differentiated.
    """
    if cache.get("kind") != spec.kind:
        raise StaleCache(f"cache built for kind {cache.get('kind')!r}, spec is {spec.kind!r}")
    dlogits = np.asarray(dlogits, dtype=np.float64)
    if cache["single"] and dlogits.ndim == 1:
        dlogits = dlogits[None, :]
    x, mask = cache["x"], cache["mask"]
    if dlogits.shape != (x.shape[0], spec.output_dim):
        raise StaleCache(
            f"dlogits shape {dlogits.shape} does not match forward batch "
            f"({x.shape[0]}, {spec.output_dim})"
        )

    if spec.kind == "ann":
        z1, hidden = cache["z1"], cache["hidden"]
        grads = {
            "w2": dlogits.T @ hidden,
            "b2": dlogits.sum(axis=0),
        }
        dhidden = dlogits @ params["w2"]
        dz1 = dhidden * mask * (z1 > 0.0)
        grads["w1"] = dz1.T @ x
        grads["b1"] = dz1.sum(axis=0)
        return {k: grads[k] for k in PARAM_LAYOUT["ann"]}

    b1, hidden, b2, b2_deriv = cache["b1"], cache["hidden"], cache["b2"], cache["b2_deriv"]
    c1, bw1, ss1 = params["l1.coeffs"], params["l1.base_weight"], params["l1.spline_scale"]
    c2, bw2, ss2 = params["l2.coeffs"], params["l2.base_weight"], params["l2.spline_scale"]

    # Output layer: logits_k = sum_j bw2[k,j] silu(h_j) + ss2[k,j] (c2[k,j,:] . B(h_j))
    s2 = silu(hidden)
    t2 = np.einsum("njg,kjg->nkj", b2, c2)
    d_bw2 = dlogits.T @ s2
    d_c2 = ss2[:, :, None] * np.einsum("nk,njg->kjg", dlogits, b2)
    d_ss2 = np.einsum("nk,nkj->kj", dlogits, t2)

    # Through the hidden nodes.
    dhidden = _silu_grad(hidden) * (dlogits @ bw2)
    dhidden += np.einsum("nk,kjg,njg->nj", dlogits, ss2[:, :, None] * c2, b2_deriv)
    du = dhidden * mask

    s1 = silu(x)
    t1 = np.einsum("nig,jig->nji", b1, c1)
    d_bw1 = du.T @ s1
    d_c1 = ss1[:, :, None] * np.einsum("nj,nig->jig", du, b1)
    d_ss1 = np.einsum("nj,nji->ji", du, t1)

    grads = {
        "l1.coeffs": d_c1,
        "l1.base_weight": d_bw1,
        "l1.spline_scale": d_ss1,
        "l2.coeffs": d_c2,
        "l2.base_weight": d_bw2,
        "l2.spline_scale": d_ss2,
    }
    return {k: grads[k] for k in PARAM_LAYOUT["kan"]}
