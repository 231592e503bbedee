"""Probability measures on the real line and their quantile representations.

A finitely supported measure is stored as sorted atoms with positive masses.
Its quantile function (pseudo-inverse of the CDF) is a right-continuous step
function on (0,1); we store the value taken on each open subinterval of the
partition induced by the breakpoints, so the measure-zero set of breakpoints
never affects any L2 quantity computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidGrid, NonMonotone

ATOM_MERGE_TOL = 1e-12
MASS_SUM_TOL = 1e-12


def _as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _unit_masses(masses: np.ndarray) -> np.ndarray:
    """Validate positivity and renormalize so the float sum is exactly 1.0.

    Inputs whose sum deviates from 1 by more than ``MASS_SUM_TOL`` are
    rejected; inputs within tolerance are rescaled, then the largest mass is
    nudged by the residual so repeated construction is a no-op.
    """
    if masses.size == 0:
        raise ValueError("measure needs at least one atom")
    if np.any(masses <= 0.0):
        raise ValueError("masses must be strictly positive")
    s = math.fsum(masses)
    if abs(s - 1.0) > MASS_SUM_TOL:
        raise ValueError(f"masses must sum to 1 within {MASS_SUM_TOL}, got {s!r}")
    if s != 1.0:
        masses = masses / s
        for _ in range(8):
            residual = 1.0 - math.fsum(masses)
            if residual == 0.0:
                break
            masses[int(np.argmax(masses))] += residual
    return masses


def _merge_close(positions: np.ndarray, masses: np.ndarray, tol: float):
    """Pool runs of positions closer than ``tol`` at their mass-weighted mean."""
    gaps = np.diff(positions)
    if positions.size and np.all(gaps >= tol):
        return positions, masses
    out_pos, out_mass = [], []
    start = 0
    for i in range(1, positions.size + 1):
        if i < positions.size and positions[i] - positions[i - 1] < tol:
            continue
        block_m = masses[start:i]
        w = math.fsum(block_m)
        if i - start == 1:
            out_pos.append(positions[start])
        else:
            out_pos.append(math.fsum(block_m * positions[start:i]) / w)
        out_mass.append(w)
        start = i
    return np.asarray(out_pos), np.asarray(out_mass)


@dataclass(frozen=True)
class DiscreteMeasure1D:
    """Finitely supported probability measure on the real line.

    Atoms are sorted strictly increasing; atoms closer than 1e-12 are merged
    on construction (summed mass, mass-weighted position). Masses are strictly
    positive and sum to exactly 1.0 after normalization. Instances are
    immutable and safe to share across threads.
    """

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        atoms = _as_float_array(self.atoms, "atoms")
        masses = _as_float_array(self.masses, "masses")
        if atoms.shape != masses.shape:
            raise ValueError("atoms and masses must have the same length")
        order = np.argsort(atoms, kind="stable")
        atoms, masses = atoms[order], masses[order].copy()
        atoms, masses = _merge_close(atoms, masses, ATOM_MERGE_TOL)
        masses = _unit_masses(masses)
        atoms.flags.writeable = False
        masses.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)

    @property
    def support_size(self) -> int:
        return self.atoms.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure1D):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(
            self.masses, other.masses
        )

    def __hash__(self):
        return hash((self.atoms.tobytes(), self.masses.tobytes()))


def dirac(x: float) -> DiscreteMeasure1D:
    return DiscreteMeasure1D(np.array([x]), np.array([1.0]))


@dataclass(frozen=True)
class StepQuantile:
    """Piecewise-constant function on (0,1), one value per open subinterval.

    ``breakpoints`` are the interior partition points (strictly increasing,
    inside (0,1)); ``values`` has one more entry than ``breakpoints``. The
    exact subinterval lengths may be supplied (quantiles built from a measure
    carry the original masses); otherwise they are the breakpoint differences.
    Values need not be monotone: weighted quantile sums live here too, before
    projection onto the monotone cone.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    lengths: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        bp = _as_float_array(self.breakpoints, "breakpoints")
        values = _as_float_array(self.values, "values")
        if bp.size and (np.any(np.diff(bp) <= 0) or bp[0] <= 0.0 or bp[-1] >= 1.0):
            raise ValueError("breakpoints must be strictly increasing inside (0,1)")
        if values.size != bp.size + 1:
            raise ValueError("need exactly one value per subinterval")
        if self.lengths is None:
            lengths = np.diff(np.concatenate(([0.0], bp, [1.0])))
        else:
            lengths = _as_float_array(self.lengths, "lengths")
            if lengths.size != values.size:
                raise ValueError("lengths and values must have the same length")
        if np.any(lengths <= 0.0) or abs(math.fsum(lengths) - 1.0) > MASS_SUM_TOL:
            raise ValueError("subinterval lengths must be positive and sum to 1")
        for arr in (bp, values, lengths):
            arr.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "lengths", lengths)

    def __call__(self, t) -> np.ndarray:
        """Evaluate at points of (0,1); on a breakpoint, the right value."""
        idx = np.searchsorted(self.breakpoints, t, side="right")
        return self.values[idx]

    @property
    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0.0))


@dataclass(frozen=True)
class GridQuantile:
    """Quantile sampled at the midpoints (i + 1/2)/m of a uniform m-grid."""

    m: int
    values: np.ndarray

    def __post_init__(self):
        if self.m < 2:
            raise InvalidGrid(f"grid size must be >= 2, got {self.m}")
        values = _as_float_array(self.values, "values")
        if values.size != self.m:
            raise ValueError("need exactly m values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.m) + 0.5) / self.m

    def to_step(self) -> StepQuantile:
        """The same function viewed as a step function on the uniform partition."""
        return StepQuantile(np.arange(1, self.m) / self.m, self.values)


def cdf(measure: DiscreteMeasure1D, x: float) -> float:
    """Right-continuous distribution function: mass of (-inf, x]."""
    k = int(np.searchsorted(measure.atoms, x, side="right"))
    if k == 0:
        return 0.0
    if k == measure.support_size:
        return 1.0
    return float(np.cumsum(measure.masses)[k - 1])


def quantile_of(measure: DiscreteMeasure1D) -> StepQuantile:
    """Pseudo-inverse of the CDF: inf{x : F(x) > w}, as a step function.

    Breakpoints are the cumulative masses strictly inside (0,1); values are
    the atoms. Pushing Lebesgue measure on (0,1) through the result recovers
    the measure.
    """
    cum = np.cumsum(measure.masses)[:-1]
    return StepQuantile(cum, measure.atoms, lengths=measure.masses)


def measure_of(q: StepQuantile) -> DiscreteMeasure1D:
    """Push-forward of Lebesgue measure on (0,1) through a monotone step function.

    Inverse of :func:`quantile_of` up to merging of equal values. Raises
    :class:`NonMonotone` when values decrease anywhere, which signals that an
    unprojected weighted sum was passed by mistake.
    """
    values, lengths = q.values, q.lengths
    if np.any(np.diff(values) < 0.0):
        raise NonMonotone("step function is not nondecreasing")
    atoms, masses = [], []
    start = 0
    for i in range(1, values.size + 1):
        if i < values.size and values[i] == values[start]:
            continue
        atoms.append(values[start])
        block = lengths[start:i]
        masses.append(block[0] if block.size == 1 else math.fsum(block))
        start = i
    return DiscreteMeasure1D(np.asarray(atoms), np.asarray(masses))


def second_moment(measure: DiscreteMeasure1D) -> float:
    """Integral of x^2 against the measure."""
    return float(np.dot(measure.masses, measure.atoms**2))


def refine_pair(a: StepQuantile, b: StepQuantile):
    """Common-refinement view of two step quantiles.

    Returns ``(lengths, va, vb)``: subinterval lengths of the merged partition
    and the two value vectors on it. Values are copied, never recomputed, so
    refinement is exact.
    """
    if a.breakpoints.size == 0 and b.breakpoints.size == 0:
        return np.array([1.0]), a.values, b.values
    edges = np.union1d(a.breakpoints, b.breakpoints)
    mids = (np.concatenate(([0.0], edges)) + np.concatenate((edges, [1.0]))) / 2.0
    lengths = np.diff(np.concatenate(([0.0], edges, [1.0])))
    return lengths, a(mids), b(mids)


def refine_many(quantiles: Sequence[StepQuantile]):
    """Common refinement of several step quantiles.

    Returns ``(edges, lengths, rows)``: the merged interior breakpoints, the
    subinterval lengths, and one value vector per input on the merged
    partition.
    """
    all_bp = [q.breakpoints for q in quantiles if q.breakpoints.size]
    if not all_bp:
        return np.array([]), np.array([1.0]), [q.values for q in quantiles]
    edges = np.unique(np.concatenate(all_bp))
    mids = (np.concatenate(([0.0], edges)) + np.concatenate((edges, [1.0]))) / 2.0
    lengths = np.diff(np.concatenate(([0.0], edges, [1.0])))
    return edges, lengths, [q(mids) for q in quantiles]


def w2_1d(a: DiscreteMeasure1D, b: DiscreteMeasure1D) -> float:
    """Quadratic Wasserstein distance via the quantile isometry.

    Equals the L2(0,1) norm of the difference of the two quantile functions,
    integrated exactly on the common breakpoint refinement.
    """
    lengths, va, vb = refine_pair(quantile_of(a), quantile_of(b))
    return math.sqrt(max(0.0, float(np.dot(lengths, (va - vb) ** 2))))


def grid_sample(q: Callable[[float], float], m: int) -> GridQuantile:
    """Sample a continuous nondecreasing quantile at grid midpoints.

    Midpoint placement keeps unbounded quantiles (e.g. Gaussian) away from
    the endpoints 0 and 1.
    """
    if m < 2:
        raise InvalidGrid(f"grid size must be >= 2, got {m}")
    t = (np.arange(m) + 0.5) / m
    values = np.asarray([float(q(ti)) for ti in t])
    return GridQuantile(m, values)


def gaussian_quantile(mean: float, std: float) -> Callable[[float], float]:
    """Quantile function of a normal law, for use with :func:`grid_sample`."""
    if std <= 0:
        raise ValueError("std must be positive")
    from scipy.special import ndtri

    return lambda t: mean + std * float(ndtri(t))


def uniform_quantile(a: float, b: float) -> Callable[[float], float]:
    """Quantile function of the uniform law on [a, b]."""
    if not b > a:
        raise ValueError("need b > a")
    return lambda t: a + (b - a) * t
