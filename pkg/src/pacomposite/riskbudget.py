"""Variance-contribution budgeting for standardized asset series.

Targets are desired shares of composite variance.  The effective weights
applied to the standardized series are those of the purely analytic
composite; a "risk contribution" here is the squared correlation of a
standardized asset with the composite.  Covariance-based Euler
contributions on unstandardized returns are not handled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_POLICY,
    RegularizationPolicy,
    WeightSpec,
    check_indicators,
    purely_analytic_composite,
    sample_correlation,
    standardize,
)
from .errors import DimensionMismatch, InvalidWeights, WindowTooShort


@dataclass(frozen=True)
class RiskBudgetSpec:
    asset_labels: tuple[str, ...]
    variance_targets: np.ndarray
    estimation_window: int

    def __post_init__(self):
        labels = tuple(str(label) for label in self.asset_labels)
        if any(not label for label in labels):
            raise InvalidWeights("asset labels must be nonempty")
        if len(set(labels)) != len(labels):
            raise InvalidWeights("asset labels must be unique")
        object.__setattr__(self, "asset_labels", labels)
        weights = WeightSpec(self.variance_targets)
        if weights.p != len(labels):
            raise DimensionMismatch(f"{weights.p} targets for {len(labels)} assets")
        object.__setattr__(self, "variance_targets", weights.variance_targets)
        if self.estimation_window < len(labels) + 1:
            raise WindowTooShort(
                f"estimation window {self.estimation_window} must be at least p + 1 = {len(labels) + 1}"
            )

    @property
    def p(self) -> int:
        return len(self.asset_labels)

    @property
    def weight_spec(self) -> WeightSpec:
        return WeightSpec(self.variance_targets)


@dataclass(frozen=True)
class BudgetReport:
    asset_labels: tuple[str, ...]
    effective_weights: np.ndarray
    realized_correlations: np.ndarray
    realized_contributions: np.ndarray
    target_relative: np.ndarray
    realized_relative: np.ndarray
    max_abs_relative_gap: float
    evaluated_on: str  # "in-sample" or "holdout"
    in_sample_gap: float
    estimation_window: int
    holdout_size: int
    regularized: bool

    def rows(self):
        for i, label in enumerate(self.asset_labels):
            yield (
                label,
                float(self.effective_weights[i]),
                float(self.realized_correlations[i]),
                float(self.realized_contributions[i]),
                float(self.target_relative[i]),
                float(self.realized_relative[i]),
            )


BUDGET_COLUMNS = (
    "asset",
    "effective_weight",
    "realized_correlation",
    "realized_contribution",
    "target_relative",
    "realized_relative",
)


def effective_weights(r, spec: WeightSpec, policy: RegularizationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """``R^-1 W (W' R^-1 W)^(-1/2)``; a composite with these weights has unit variance under ``R``."""
    return purely_analytic_composite(None, r, spec, policy).effective_weights


def realized_correlations(x, weights) -> np.ndarray:
    """Empirical correlation of each standardized column of ``x`` with ``z @ weights``."""
    z = standardize(x)
    scores = z @ weights
    n = z.shape[0]
    sd = np.sqrt(((scores - scores.mean()) ** 2).sum() / (n - 1))
    return z.T @ (scores - scores.mean()) / (n - 1) / sd


def evaluate_budget(
    returns,
    spec: RiskBudgetSpec,
    holdout=None,
    policy: RegularizationPolicy = DEFAULT_POLICY,
) -> BudgetReport:
    """Fit effective weights on the estimation window and report realized contributions.

    The estimation window is the last ``spec.estimation_window`` rows of
    ``returns``.  Realized contributions are always measured from the data
    itself.  With ``holdout`` given, the reported figures are those of the
    holdout under the in-sample weights; the in-sample gap is kept in
    ``in_sample_gap`` either way.
    """
    returns = check_indicators(returns)
    if returns.shape[1] != spec.p:
        raise DimensionMismatch(f"returns have {returns.shape[1]} columns, spec has {spec.p} assets")
    if returns.shape[0] < spec.estimation_window:
        raise WindowTooShort(
            f"only {returns.shape[0]} rows for an estimation window of {spec.estimation_window}"
        )
    window = returns[-spec.estimation_window:]
    r = sample_correlation(standardize(window))
    weights = spec.weight_spec
    result = purely_analytic_composite(None, r, weights, policy)
    v = result.effective_weights
    target_relative = weights.relative_targets

    def measure(x):
        corr = realized_correlations(x, v)
        contrib = corr ** 2
        rel = contrib / contrib.min()
        return corr, contrib, rel, float(np.max(np.abs(rel - target_relative)))

    corr, contrib, rel, in_gap = measure(window)
    evaluated_on, gap, holdout_size = "in-sample", in_gap, 0
    if holdout is not None:
        holdout = check_indicators(holdout)
        if holdout.shape[1] != spec.p:
            raise DimensionMismatch(f"holdout has {holdout.shape[1]} columns, spec has {spec.p} assets")
        corr, contrib, rel, gap = measure(holdout)
        evaluated_on, holdout_size = "holdout", holdout.shape[0]

    return BudgetReport(
        asset_labels=spec.asset_labels,
        effective_weights=v,
        realized_correlations=corr,
        realized_contributions=contrib,
        target_relative=target_relative,
        realized_relative=rel,
        max_abs_relative_gap=gap,
        evaluated_on=evaluated_on,
        in_sample_gap=in_gap,
        estimation_window=spec.estimation_window,
        holdout_size=holdout_size,
        regularized=result.regularized,
    )
