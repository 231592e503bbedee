"""Orthogonal projection onto the cone of nondecreasing functions in L2.

Two independent algorithms compute the same projection and serve as mutual
oracles: pool-adjacent-violators on the weighted step representation, and the
right-derivative of the lower convex envelope of the integral function. The
projection of a step function is a step function on the same partition, so
both run in exact finite arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PartitionMismatch


def _as_array(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 1-D array")
    return arr


@dataclass(frozen=True)
class WeightedSteps:
    """Step function given by values and positive subinterval weights.

    Weights are the subinterval lengths of the underlying partition. Functions
    on (0,1) have weights summing to 1, but any positive total is accepted so
    the projection stays usable on partial domains.
    """

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = _as_array(self.values, "values")
        weights = _as_array(self.weights, "weights")
        if values.shape != weights.shape or values.size == 0:
            raise ValueError("values and weights must be nonempty, equal length")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        values.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)

    def mean(self) -> float:
        return float(np.dot(self.values, self.weights)) / self.total


def project_pava(f: WeightedSteps) -> WeightedSteps:
    """Project onto nondecreasing step functions by pool-adjacent-violators.

    Scans left to right keeping a stack of blocks with increasing means;
    whenever a block's mean does not exceed its predecessor's, the two are
    pooled into their weight-averaged mean. Blocks with equal means are merged
    eagerly, which leaves the output values unchanged but keeps the block
    structure canonical.
    """
    values, weights = f.values, f.weights
    n = values.size
    # Parallel stacks: block mean, block weight, number of source entries.
    means = np.empty(n)
    wsum = np.empty(n)
    count = np.empty(n, dtype=np.intp)
    top = -1
    for i in range(n):
        top += 1
        means[top] = values[i]
        wsum[top] = weights[i]
        count[top] = 1
        while top > 0 and means[top - 1] >= means[top]:
            if means[top - 1] == means[top]:
                pooled = means[top]  # exact: pooling equal means changes nothing
            else:
                pooled = (means[top - 1] * wsum[top - 1] + means[top] * wsum[top]) / (
                    wsum[top - 1] + wsum[top]
                )
            means[top - 1] = pooled
            wsum[top - 1] += wsum[top]
            count[top - 1] += count[top]
            top -= 1
    out = np.repeat(means[: top + 1], count[: top + 1])
    return WeightedSteps(out, weights)


def project_envelope(f: WeightedSteps) -> WeightedSteps:
    """Project via the convex envelope of the integral function.

    Builds the piecewise-linear integral F of the step function, takes the
    lower convex hull of its breakpoint graph by a monotone chain (collinear
    points dropped), and returns the right-derivative, i.e. the hull slopes,
    as a step function on the original partition.
    """
    values, weights = f.values, f.weights
    n = values.size
    xs = np.concatenate(([0.0], np.cumsum(weights)))
    ys = np.concatenate(([0.0], np.cumsum(values * weights)))
    hull = [0, 1]
    for k in range(2, n + 1):
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            cross = (xs[j] - xs[i]) * (ys[k] - ys[i]) - (ys[j] - ys[i]) * (xs[k] - xs[i])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(k)
    hx = xs[hull]
    slopes = np.diff(ys[hull]) / np.diff(hx)
    # Each source subinterval lies inside exactly one hull segment.
    mids = (xs[:-1] + xs[1:]) / 2.0
    seg = np.searchsorted(hx, mids, side="right") - 1
    return WeightedSteps(slopes[seg], weights)


def distance_l2(f: WeightedSteps, g: WeightedSteps) -> float:
    """Weighted L2 distance between two step functions on the same domain.

    Partitions are refined to their common breakpoints first; functions whose
    total lengths disagree cannot be refined and raise PartitionMismatch.
    """
    if abs(f.total - g.total) > 1e-9:
        raise PartitionMismatch(
            f"domains of total length {f.total!r} and {g.total!r} cannot be refined"
        )
    if f.weights.shape == g.weights.shape and np.array_equal(f.weights, g.weights):
        diff = f.values - g.values
        return math.sqrt(max(0.0, float(np.dot(f.weights, diff * diff))))
    total = 0.5 * (f.total + g.total)
    ef = np.cumsum(f.weights)[:-1]
    eg = np.cumsum(g.weights)[:-1]
    edges = np.unique(np.concatenate((ef, eg)))
    edges = edges[(edges > 0.0) & (edges < total)]
    lengths = np.diff(np.concatenate(([0.0], edges, [total])))
    mids = np.concatenate(([0.0], edges)) + lengths / 2.0
    vf = f.values[np.searchsorted(ef, mids, side="right")]
    vg = g.values[np.searchsorted(eg, mids, side="right")]
    diff = vf - vg
    return math.sqrt(max(0.0, float(np.dot(lengths, diff * diff))))
