"""Uniform B-spline basis over a bounded grid.

The basis parameterizes the learnable univariate edge functions of the
spline-edge network. Evaluation uses the de Boor triangular recursion on
the knot span containing x, which keeps the partition of unity exact to
machine precision and yields the degree-(k-1) row needed for derivatives
for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SplineGrid", "bspline_basis"]


@dataclass(frozen=True)
class SplineGrid:
    """Uniform knot grid on [low, high], extended by `degree` knots per side.

    ``n_intervals`` interior intervals support ``n_intervals + degree``
    basis functions of the given degree.
    """

    n_intervals: int
    degree: int
    low: float
    high: float
    knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_intervals < 1:
            raise ValueError(f"n_intervals must be >= 1, got {self.n_intervals}")
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")
        if not self.low < self.high:
            raise ValueError(f"grid range must be increasing, got [{self.low}, {self.high}]")
        h = (self.high - self.low) / self.n_intervals
        idx = np.arange(-self.degree, self.n_intervals + self.degree + 1, dtype=np.float64)
        object.__setattr__(self, "knots", idx * h + self.low)

    @property
    def n_basis(self) -> int:
        return self.n_intervals + self.degree


def bspline_basis(grid: SplineGrid, x, with_deriv: bool = False):
    """Evaluate all basis functions (and optionally derivatives) at x.

    x may have any shape; the result appends a trailing axis of length
    ``grid.n_basis``. Inputs are clamped to [low, high] before evaluation,
    so out-of-range points reproduce the nearest edge's basis values.
    Inside the grid the values are non-negative and sum to 1.
    """
    t, p = grid.knots, grid.degree
    x = np.asarray(x, dtype=np.float64)
    shape = x.shape
    xf = np.clip(x.ravel(), grid.low, grid.high)
    m = xf.size

    # Knot span j: t[j] <= x < t[j+1], clipped onto the interior spans so
    # x == high evaluates by left-continuity.
    j = np.searchsorted(t, xf, side="right") - 1
    j = np.clip(j, p, p + grid.n_intervals - 1)

    # Triangular recursion: after stage d, nz[:, r] = B_{j-d+r, d}(x).
    nz = np.zeros((m, p + 1))
    nz[:, 0] = 1.0
    left = np.zeros((m, p + 1))
    right = np.zeros((m, p + 1))
    lower_order = None
    for d in range(1, p + 1):
        if with_deriv and d == p:
            lower_order = nz[:, :p].copy()
        left[:, d] = xf - t[j + 1 - d]
        right[:, d] = t[j + d] - xf
        saved = np.zeros(m)
        for r in range(d):
            term = nz[:, r] / (right[:, r + 1] + left[:, d - r])
            nz[:, r] = saved + right[:, r + 1] * term
            saved = left[:, d - r] * term
        nz[:, d] = saved

    rows = np.arange(m)[:, None]
    cols = j[:, None] + np.arange(-p, 1)[None, :]
    values = np.zeros((m, grid.n_basis))
    values[rows, cols] = nz
    values = values.reshape(*shape, grid.n_basis)
    if not with_deriv:
        return values

    # d/dx B_{k,p} = p * (B_{k,p-1}/(t[k+p]-t[k]) - B_{k+1,p-1}/(t[k+p+1]-t[k+1]))
    # with the nonzero degree-(p-1) row being indices j-p+1 .. j.
    r_idx = np.arange(p + 1)[None, :]
    k = j[:, None] - p + r_idx
    b_lower_k = np.zeros((m, p + 1))
    b_lower_k[:, 1:] = lower_order
    b_lower_k1 = np.zeros((m, p + 1))
    b_lower_k1[:, :p] = lower_order
    dnz = p * (b_lower_k / (t[k + p] - t[k]) - b_lower_k1 / (t[k + p + 1] - t[k + 1]))

    derivs = np.zeros((m, grid.n_basis))
    derivs[rows, cols] = dnz
    # Clamping makes the basis constant outside the grid: zero slope there.
    outside = (x.ravel() < grid.low) | (x.ravel() > grid.high)
    derivs[outside] = 0.0
    derivs = derivs.reshape(*shape, grid.n_basis)
    return values, derivs
