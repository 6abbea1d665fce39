"""Analytic and purely analytic composites with exact variance contributions."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CompositeKind,
    CompositeResult,
    CorrelationMatrix,
    RegularizationPolicy,
    WeightSpec,
    analytic_composite,
    compare_composites,
    contribution_report,
    purely_analytic_composite,
    regularized_inverse,
    sample_correlation,
    standardize,
    weighted_sum_variance,
)
from .population import (  # noqa: E402
    PopulationSpec,
    default_grid,
    make_equicorrelated,
    make_heterogeneous_R,
    mvn_sample,
    run_sweep,
)
from .riskbudget import RiskBudgetSpec, effective_weights, evaluate_budget  # noqa: E402

__all__ = [
    "CompositeKind",
    "CompositeResult",
    "CorrelationMatrix",
    "PopulationSpec",
    "RegularizationPolicy",
    "RiskBudgetSpec",
    "WeightSpec",
    "analytic_composite",
    "compare_composites",
    "contribution_report",
    "default_grid",
    "effective_weights",
    "evaluate_budget",
    "make_equicorrelated",
    "make_heterogeneous_R",
    "mvn_sample",
    "purely_analytic_composite",
    "regularized_inverse",
    "run_sweep",
    "sample_correlation",
    "standardize",
    "weighted_sum_variance",
]
