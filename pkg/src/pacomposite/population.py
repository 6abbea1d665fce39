"""Population correlation structures and the population-level sweep.

Heterogeneous correlation matrices are built by perturbing an
equicorrelation matrix along a seeded random direction and bisecting the
perturbation scale until the standard deviation of the off-diagonal
entries hits its target.  Because all populations of a grid share one seed
they share one direction, so the default grid differs only in scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DEFAULT_POLICY,
    CompositeKind,
    CorrelationMatrix,
    RegularizationPolicy,
    WeightSpec,
    analytic_composite,
    ldl_pivots,
    purely_analytic_composite,
)
from .errors import DimensionMismatch, InfeasibleRho, NotPositiveDefinite, TargetUnreachable

GENERATOR = "numpy.random.PCG64"
EIGEN_FLOOR = 1e-4
DEFAULT_SEED = 7
DEFAULT_MEAN_RHO = 0.3

SWEEP_COLUMNS = (
    "population_index",
    "target_sd_rho",
    "achieved_sd_rho",
    "min_rho",
    "max_rho",
    "kind",
    "weight_pattern",
    "indicator_index",
    "correlation",
    "contribution",
    "relative_contribution",
)


def sd_rho(r) -> float:
    """Sample standard deviation (divisor m - 1) of the off-diagonal correlations."""
    r = r.values if isinstance(r, CorrelationMatrix) else np.asarray(r)
    off = r[np.triu_indices(r.shape[0], k=1)]
    if off.size < 2:
        return 0.0
    return float(np.std(off, ddof=1))


@dataclass(frozen=True)
class PopulationSpec:
    p: int
    mean_rho: float = DEFAULT_MEAN_RHO
    target_sd_rho: float = 0.0
    seed: int = DEFAULT_SEED
    sd_tolerance: float = 1e-3

    def __post_init__(self):
        if self.p < 2:
            raise DimensionMismatch(f"need p >= 2, got {self.p}")
        if self.target_sd_rho < 0:
            raise ValueError(f"target_sd_rho must be nonnegative, got {self.target_sd_rho}")
        _check_rho(self.p, self.mean_rho)


def _check_rho(p: int, rho: float):
    lower = -1.0 / (p - 1)
    if not lower < rho < 1.0:
        raise InfeasibleRho(f"rho={rho} outside ({lower:.6g}, 1) for p={p}")


def make_equicorrelated(p: int, rho: float) -> CorrelationMatrix:
    _check_rho(p, rho)
    r = np.full((p, p), float(rho))
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(r)


def nearest_correlation(a, floor: float = EIGEN_FLOOR) -> np.ndarray:
    """Clip eigenvalues at ``floor`` and rescale back to a unit diagonal.

    Matrices whose smallest eigenvalue is already above ``floor`` are
    returned unchanged.
    """
    a = (np.asarray(a, dtype=float) + np.asarray(a, dtype=float).T) / 2.0
    evals, evecs = np.linalg.eigh(a)
    if evals.min() >= floor:
        out = a.copy()
    else:
        out = (evecs * np.maximum(evals, floor)) @ evecs.T
        d = 1.0 / np.sqrt(np.diag(out))
        out = out * np.outer(d, d)
        out = (out + out.T) / 2.0
    np.fill_diagonal(out, 1.0)
    return out


def _perturbation_direction(p: int, seed: int) -> np.ndarray:
    """Symmetric zero-diagonal matrix whose off-diagonals have mean 0 and sd 1."""
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(p, k=1)
    e = rng.standard_normal(iu[0].size)
    e = e - e.mean()
    sd = e.std(ddof=1) if e.size > 1 else 0.0
    if sd > 0:
        e = e / sd
    out = np.zeros((p, p))
    out[iu] = e
    return out + out.T


def make_heterogeneous_R(spec: PopulationSpec, max_iter: int = 200) -> CorrelationMatrix:
    """Positive-definite correlation matrix with off-diagonal sd near ``target_sd_rho``.

    Raises
    ------
    TargetUnreachable
        If bisection cannot get within ``sd_tolerance`` of the target in
        ``max_iter`` steps, or the off-diagonal mean drifts more than 0.02.
    """
    base = make_equicorrelated(spec.p, spec.mean_rho).values
    if spec.target_sd_rho == 0:
        return CorrelationMatrix(base)
    if spec.p == 2:
        raise TargetUnreachable("a 2x2 matrix has a single off-diagonal entry; sd(rho) is undefined")
    direction = _perturbation_direction(spec.p, spec.seed)
    iu = np.triu_indices(spec.p, k=1)
    offdiag = 1.0 - np.eye(spec.p)

    def build(scale):
        # clipping pulls the off-diagonal mean; shift it back a few times
        shift = 0.0
        for _ in range(50):
            r = nearest_correlation(base + scale * direction + shift * offdiag)
            err = spec.mean_rho - r[iu].mean()
            if abs(err) < 1e-9:
                break
            shift += err
        return r, sd_rho(r)

    target = spec.target_sd_rho
    lo, hi = 0.0, target
    r, achieved = build(hi)
    it = 0
    while achieved < target - spec.sd_tolerance and it < max_iter:
        # clipping shrinks the spread, so widen the bracket first
        lo, hi = hi, hi * 2.0
        r, achieved = build(hi)
        it += 1
    while abs(achieved - target) > spec.sd_tolerance and it < max_iter:
        mid = (lo + hi) / 2.0
        r, achieved = build(mid)
        if achieved < target:
            lo = mid
        else:
            hi = mid
        it += 1
    if abs(achieved - target) > spec.sd_tolerance:
        raise TargetUnreachable(
            f"sd(rho) {achieved:.4f} not within {spec.sd_tolerance} of {target} after {it} steps"
        )
    mean = r[np.triu_indices(spec.p, k=1)].mean()
    if abs(mean - spec.mean_rho) > 0.02:
        raise TargetUnreachable(f"off-diagonal mean drifted to {mean:.4f} (wanted {spec.mean_rho})")
    return CorrelationMatrix(r)


def cholesky_factor(r) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L' = R``; raises if ``R`` is not positive definite."""
    r = r.values if isinstance(r, CorrelationMatrix) else np.asarray(r, dtype=float)
    if not np.all(ldl_pivots(r) > 1e-12):
        raise NotPositiveDefinite("correlation matrix is not positive definite")
    return np.linalg.cholesky(r)


def mvn_sample(r, n: int, seed: int) -> np.ndarray:
    """``n`` zero-mean multivariate normal draws with covariance ``R``."""
    lower = cholesky_factor(r)
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, lower.shape[0])) @ lower.T


def default_grid(
    p: int = 5,
    sd_min: float = 0.01,
    sd_max: float = 0.23,
    count: int = 6,
    mean_rho: float = DEFAULT_MEAN_RHO,
    seed: int = DEFAULT_SEED,
) -> list[PopulationSpec]:
    """Populations with target sd(rho) evenly spaced between ``sd_min`` and ``sd_max``."""
    return [
        PopulationSpec(p=p, mean_rho=mean_rho, target_sd_rho=float(s), seed=seed)
        for s in np.linspace(sd_min, sd_max, count)
    ]


@dataclass(frozen=True)
class PopulationRecord:
    index: int
    spec: PopulationSpec
    correlation: CorrelationMatrix
    achieved_sd_rho: float
    min_rho: float
    max_rho: float
    # keyed by (kind, weight pattern name)
    results: dict = field(repr=False)

    def spread(self, kind: CompositeKind, pattern: str = "unit") -> float:
        c = self.results[kind, pattern].indicator_correlations
        return float(c.max() - c.min())


@dataclass(frozen=True)
class SweepResult:
    records: list[PopulationRecord]
    metadata: dict

    def rows(self):
        for rec in self.records:
            for (kind, pattern), res in rec.results.items():
                for i in range(res.p):
                    yield (
                        rec.index,
                        rec.spec.target_sd_rho,
                        rec.achieved_sd_rho,
                        rec.min_rho,
                        rec.max_rho,
                        kind.value,
                        pattern,
                        i,
                        float(res.indicator_correlations[i]),
                        float(res.variance_contributions[i]),
                        float(res.relative_contributions[i]),
                    )


def run_sweep(
    grid: list[PopulationSpec],
    spec_weights: WeightSpec,
    unit_weights: WeightSpec | None = None,
    policy: RegularizationPolicy = DEFAULT_POLICY,
) -> SweepResult:
    """Population-level indicator/composite correlations for every grid entry.

    Both composite kinds are evaluated under the unit weights and under
    ``spec_weights``, directly from each population matrix (no sampling).
    """
    if not grid:
        raise ValueError("empty population grid")
    p = grid[0].p
    if any(s.p != p for s in grid):
        raise DimensionMismatch("all populations in a sweep must share p")
    if unit_weights is None:
        unit_weights = WeightSpec.unit(p)
    patterns = {"unit": unit_weights, "weighted": spec_weights}
    records = []
    for index, spec in enumerate(grid, start=1):
        r = make_heterogeneous_R(spec)
        off = r.off_diagonal()
        results = {}
        for name, weights in patterns.items():
            results[CompositeKind.ANALYTIC, name] = analytic_composite(None, r, weights)
            results[CompositeKind.PURELY_ANALYTIC, name] = purely_analytic_composite(
                None, r, weights, policy
            )
        records.append(
            PopulationRecord(
                index=index,
                spec=spec,
                correlation=r,
                achieved_sd_rho=sd_rho(r),
                min_rho=float(off.min()),
                max_rho=float(off.max()),
                results=results,
            )
        )
    metadata = {
        "seeds": sorted({s.seed for s in grid}),
        "mean_rho": sorted({s.mean_rho for s in grid}),
        "generator": GENERATOR,
        "weighted_targets": [float(t) for t in spec_weights.variance_targets],
    }
    return SweepResult(records=records, metadata=metadata)
