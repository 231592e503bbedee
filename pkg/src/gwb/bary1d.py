"""Signed Wasserstein barycenters on the real line.

A signed family is a finite list of (weight, measure) pairs whose weights sum
to 1 but may individually be negative. The unique barycenter is obtained by
summing the quantile functions with their signed weights on a common
partition and projecting the sum onto the monotone cone. Energies may be
negative; they are reported as computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import measures
from .errors import StdOrder, WeightSumInvalid
from .isotonic import WeightedSteps, project_pava
from .measures import DiscreteMeasure1D, GridQuantile, StepQuantile

WEIGHT_SUM_TOL = 1e-10

MeasureLike = Union[DiscreteMeasure1D, GridQuantile]


def _as_step(measure: MeasureLike) -> StepQuantile:
    if isinstance(measure, GridQuantile):
        return measure.to_step()
    return measures.quantile_of(measure)


def _as_measure(measure: MeasureLike) -> DiscreteMeasure1D:
    if isinstance(measure, GridQuantile):
        return measures.measure_of(measure.to_step())
    return measure


@dataclass(frozen=True)
class SignedFamily:
    """Finite signed weighting of probability measures, total weight 1.

    The weight sum condition is a theorem hypothesis, not a convention, so
    families violating it are rejected rather than renormalized.
    """

    entries: tuple

    def __init__(self, entries: Sequence[tuple]):
        entries = tuple((float(w), m) for w, m in entries)
        if not entries:
            raise ValueError("family needs at least one entry")
        for _, m in entries:
            if not isinstance(m, (DiscreteMeasure1D, GridQuantile)):
                raise TypeError(f"unsupported measure type {type(m).__name__}")
        s = math.fsum(w for w, _ in entries)
        if abs(s - 1.0) > WEIGHT_SUM_TOL:
            raise WeightSumInvalid(
                f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {s!r}"
            )
        object.__setattr__(self, "entries", entries)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.entries])

    @property
    def measures(self) -> tuple:
        return tuple(m for _, m in self.entries)

    @property
    def has_grid(self) -> bool:
        return any(isinstance(m, GridQuantile) for m in self.measures)


@dataclass(frozen=True)
class FamilyStats:
    """Total variation and quadratic moment of the absolute weighting."""

    total_variation: float
    moment2: float


@dataclass(frozen=True)
class GaussianParams:
    mean: float
    std: float

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError("std must be positive")


def barycenter(family: SignedFamily) -> MeasureLike:
    """Unique minimizer of the signed barycenter energy.

    Discrete entries are refined to a common partition; if any entry is
    grid-based, every quantile is promoted to the largest grid instead. The
    signed weighted sum of quantiles is projected onto the monotone cone and
    pushed back to a measure (or returned as a grid quantile).
    """
    if family.has_grid:
        m = max(q.m for q in family.measures if isinstance(q, GridQuantile))
        t = (np.arange(m) + 0.5) / m
        acc = np.zeros(m)
        for w, meas in family.entries:
            q = _as_step(meas)
            acc = acc + w * q(t)
        projected = project_pava(WeightedSteps(acc, np.full(m, 1.0 / m)))
        return GridQuantile(m, projected.values)
    edges, lengths, value_rows = measures.refine_many(
        [measures.quantile_of(m) for m in family.measures]
    )
    acc = np.zeros_like(value_rows[0])
    for (w, _), vals in zip(family.entries, value_rows):
        acc = acc + w * vals
    projected = project_pava(WeightedSteps(acc, lengths))
    return measures.measure_of(
        StepQuantile(edges, projected.values, lengths=lengths)
    )


def weighted_quantile_sum(family: SignedFamily):
    """Signed weighted sum of the family's quantiles, before projection.

    Returns the sum as a WeightedSteps on the common partition; useful to
    check whether the projection step is active.
    """
    if family.has_grid:
        m = max(q.m for q in family.measures if isinstance(q, GridQuantile))
        t = (np.arange(m) + 0.5) / m
        acc = np.zeros(m)
        for w, meas in family.entries:
            acc = acc + w * _as_step(meas)(t)
        return WeightedSteps(acc, np.full(m, 1.0 / m))
    lengths, value_rows = measures.refine_many(
        [measures.quantile_of(m) for m in family.measures]
    )
    acc = np.zeros_like(value_rows[0])
    for (w, _), vals in zip(family.entries, value_rows):
        acc = acc + w * vals
    return WeightedSteps(acc, lengths)


def energy(family: SignedFamily, mu: DiscreteMeasure1D) -> float:
    """Signed sum of squared Wasserstein distances from mu to the family."""
    return math.fsum(
        w * measures.w2_1d(mu, _as_measure(m)) ** 2 for w, m in family.entries
    )


def family_stats(family: SignedFamily) -> FamilyStats:
    tv = math.fsum(abs(w) for w, _ in family.entries)
    m2 = math.fsum(
        abs(w) * measures.second_moment(_as_measure(m)) for w, m in family.entries
    )
    return FamilyStats(total_variation=tv, moment2=m2)


def lower_bound(family: SignedFamily, mu: DiscreteMeasure1D):
    """Coercivity bound: energy >= m2(mu)^2/2 - (1 + 2M)M2.

    Returns (lhs, rhs); the contract lhs >= rhs holds for every valid input.
    """
    stats = family_stats(family)
    lhs = energy(family, mu)
    rhs = 0.5 * measures.second_moment(mu) - (
        1.0 + 2.0 * stats.total_variation
    ) * stats.moment2
    return lhs, rhs


def stability_gap(
    a: Sequence[DiscreteMeasure1D],
    b: Sequence[DiscreteMeasure1D],
    weights: Sequence[float],
):
    """Barycenter distance vs the weighted sum of pairwise distances.

    Returns (lhs, rhs) with lhs = W2 between the barycenters of the two
    perturbed families and rhs = sum |w_i| W2(a_i, b_i); the projection is
    non-expanding, so lhs <= rhs.
    """
    if not (len(a) == len(b) == len(weights)):
        raise ValueError("a, b and weights must have equal lengths")
    fam_a = SignedFamily(list(zip(weights, a)))
    fam_b = SignedFamily(list(zip(weights, b)))
    lhs = measures.w2_1d(barycenter(fam_a), barycenter(fam_b))
    rhs = math.fsum(
        abs(w) * measures.w2_1d(x, y) for w, x, y in zip(weights, a, b)
    )
    return lhs, rhs


def gauss_dirac_params(g1: GaussianParams, g2: GaussianParams):
    """Weight and location collapsing two Gaussians to a Dirac.

    Under sigma_1 > sigma_2 returns (lambda_bar, z_bar) with
    lambda_bar = (sigma_1 - sigma_2)/sigma_1 and
    z_bar = (sigma_1 m_2 - sigma_2 m_1)/(sigma_1 - sigma_2); the Dirac at
    z_bar is the barycenter of the pair with weights (lambda_bar - 1)/lambda_bar
    on g1 and 1/lambda_bar on g2.
    """
    if g1.std <= g2.std:
        raise StdOrder(f"need sigma_1 > sigma_2, got {g1.std} <= {g2.std}")
    lambda_bar = (g1.std - g2.std) / g1.std
    z_bar = (g1.std * g2.mean - g2.std * g1.mean) / (g1.std - g2.std)
    return lambda_bar, z_bar


def gauss_dirac_family(
    g1: GaussianParams, g2: GaussianParams, m: int
) -> SignedFamily:
    """Grid-discretized signed family whose barycenter collapses to a Dirac.

    The wider Gaussian g1 carries the negative weight (lambda_bar - 1)/lambda_bar,
    the narrower g2 the positive weight 1/lambda_bar.
    """
    lambda_bar, _ = gauss_dirac_params(g1, g2)
    grid1 = measures.grid_sample(measures.gaussian_quantile(g1.mean, g1.std), m)
    grid2 = measures.grid_sample(measures.gaussian_quantile(g2.mean, g2.std), m)
    return SignedFamily(
        [((lambda_bar - 1.0) / lambda_bar, grid1), (1.0 / lambda_bar, grid2)]
    )


def argmin_certificate(
    family: SignedFamily,
    candidate: DiscreteMeasure1D,
    trials: int,
    radius: float,
    seed: int,
) -> bool:
    """Numerical optimality tripwire for a barycenter candidate.

    Perturbs the candidate's quantile values with i.i.d. uniform noise of the
    given radius, re-projects onto the monotone cone, and checks that no
    perturbation beats the candidate's energy by more than 1e-9. Seeded and
    reproducible; a sanity check, not a proof.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    base = energy(family, candidate)
    q = measures.quantile_of(candidate)
    for _ in range(trials):
        noise = rng.uniform(-radius, radius, size=q.values.size)
        perturbed = project_pava(WeightedSteps(q.values + noise, q.lengths))
        bp = np.cumsum(q.lengths)[:-1]
        mu = measures.measure_of(
            StepQuantile(bp, perturbed.values, lengths=q.lengths)
        )
        if base > energy(family, mu) + 1e-9:
            return False
    return True
