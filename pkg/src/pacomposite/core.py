"""Matrix algebra for analytic and purely analytic composites.

An *analytic* composite applies a priori weights ``W`` directly to the
standardized indicators ``z``::

    c = z W (W' R W)^(-1/2)

so each indicator's share of composite variance also depends on the
inter-correlations ``R``.  A *purely analytic* composite premultiplies the
weights by ``R^-1``::

    c = z R^-1 W (W' R^-1 W)^(-1/2)

which makes the indicator/composite correlations equal to
``W (W' R^-1 W)^(-1/2)``, i.e. proportional to ``W`` whatever ``R`` is.

Sample quantities use the ``n - 1`` divisor throughout.  Every composite
function also works in population mode: pass ``z=None`` together with a
population correlation matrix and only the diagnostics are computed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateVariance,
    DimensionMismatch,
    InvalidWeights,
    NonFiniteInput,
    SingularAfterRegularization,
    ZeroVarianceColumn,
)

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-12
DEGENERATE_TOL = 1e-12


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric ``p x p`` matrix with unit diagonal.

    ``regularized`` records whether a ridge had to be added before the
    matrix could be inverted.  It is only ever set on the copy returned
    inside :class:`Inverse`; estimation never sets it.
    """

    values: np.ndarray
    regularized: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionMismatch(f"correlation matrix must be square, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInput("correlation matrix has non-finite entries")
        if np.max(np.abs(values - values.T), initial=0.0) > SYMMETRY_TOL:
            raise DimensionMismatch("correlation matrix is not symmetric")
        if np.max(np.abs(np.diag(values) - 1.0), initial=0.0) > SYMMETRY_TOL:
            raise DimensionMismatch("correlation matrix diagonal is not 1")
        if np.max(np.abs(values), initial=0.0) > 1.0 + SYMMETRY_TOL:
            raise DimensionMismatch("correlation entries outside [-1, 1]")

    @property
    def p(self) -> int:
        return self.values.shape[0]

    def off_diagonal(self) -> np.ndarray:
        """The ``p (p - 1) / 2`` upper-triangle entries."""
        return self.values[np.triu_indices(self.p, k=1)]


@dataclass(frozen=True)
class RegularizationPolicy:
    """Ridge rule applied before inverting a correlation matrix.

    A ridge of ``ridge`` is added to the diagonal whenever the determinant
    is at or below ``det_threshold``.  Further ridges (up to
    ``max_ridge_steps`` in total) are added only while the matrix is still
    not numerically invertible.
    """

    det_threshold: float = 1e-5
    ridge: float = 1e-6
    max_ridge_steps: int = 3
    residual_tol: float = 1e-8
    pivot_tol: float = PIVOT_TOL


DEFAULT_POLICY = RegularizationPolicy()


@dataclass(frozen=True)
class Inverse:
    values: np.ndarray
    inverted: np.ndarray  # the matrix actually inverted (ridge included)
    determinant: float
    ridge_steps: int = 0

    @property
    def regularized(self) -> bool:
        return self.ridge_steps > 0


@dataclass(frozen=True)
class WeightSpec:
    """A priori target variance contributions.

    The weight vector is the positive square root of the targets, so a
    target of ``(1, 1, 1, 2, 2)`` asks the last two indicators to carry
    twice the variance share of the first three.
    """

    variance_targets: np.ndarray

    def __post_init__(self):
        targets = np.array(self.variance_targets, dtype=float).reshape(-1)
        if targets.size == 0:
            raise InvalidWeights("no variance targets given")
        if not np.all(np.isfinite(targets)):
            raise InvalidWeights("variance targets must be finite")
        if np.any(targets <= 0):
            raise InvalidWeights("variance targets must be strictly positive")
        targets.setflags(write=False)
        object.__setattr__(self, "variance_targets", targets)

    @classmethod
    def unit(cls, p: int) -> "WeightSpec":
        return cls(np.ones(p))

    @classmethod
    def from_weights(cls, weights) -> "WeightSpec":
        """Build from raw weights ``W``; mixed or negative signs are rejected."""
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if np.any(weights <= 0):
            raise InvalidWeights("weights must be strictly positive")
        return cls(weights ** 2)

    @property
    def p(self) -> int:
        return self.variance_targets.size

    @property
    def weights(self) -> np.ndarray:
        return np.sqrt(self.variance_targets)

    @property
    def relative_targets(self) -> np.ndarray:
        return self.variance_targets / self.variance_targets.min()


class CompositeKind(enum.Enum):
    ANALYTIC = "Analytic"
    PURELY_ANALYTIC = "PurelyAnalytic"

    @property
    def label(self) -> str:
        # naming used by the reference results table
        return {"Analytic": "Analytic comp.", "PurelyAnalytic": "Purely analytic comp."}[self.value]


@dataclass(frozen=True)
class CompositeResult:
    kind: CompositeKind
    effective_weights: np.ndarray
    indicator_correlations: np.ndarray
    composite_variance: float
    scores: np.ndarray | None = None
    regularized: bool = False
    variance_contributions: np.ndarray = field(init=False)
    relative_contributions: np.ndarray = field(init=False)

    def __post_init__(self):
        contributions = self.indicator_correlations ** 2
        object.__setattr__(self, "variance_contributions", contributions)
        object.__setattr__(self, "relative_contributions", contributions / contributions.min())

    @property
    def p(self) -> int:
        return self.indicator_correlations.size


class ReportRow(NamedTuple):
    indicator: int
    correlation: float
    contribution: float
    relative_contribution: float


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------

def _as_matrix(x, name="matrix") -> np.ndarray:
    if isinstance(x, CorrelationMatrix):
        return x.values
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def check_indicators(x) -> np.ndarray:
    """Validate an ``n x p`` indicator table and return it as a float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise DimensionMismatch(f"indicator matrix must be 2-dimensional, got shape {x.shape}")
    n, p = x.shape
    if n < 2 or p < 2:
        raise DimensionMismatch(f"need at least 2 cases and 2 indicators, got {n}x{p}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("indicator matrix contains NaN or infinite entries")
    return x


def standardize(x) -> np.ndarray:
    """Center each column and scale it to unit sample variance (divisor n - 1).

    Raises
    ------
    NonFiniteInput
        If any entry is NaN or infinite.
    ZeroVarianceColumn
        If a column is constant.
    """
    x = check_indicators(x)
    centered = x - x.mean(axis=0)
    sd = np.sqrt((centered ** 2).sum(axis=0) / (x.shape[0] - 1))
    scale = np.max(np.abs(x), axis=0)
    for j in range(x.shape[1]):
        # relative check catches columns that are constant up to round-off
        if sd[j] == 0.0 or sd[j] <= 1e-13 * scale[j]:
            raise ZeroVarianceColumn(j)
    return centered / sd


def sample_correlation(z) -> CorrelationMatrix:
    """``R = z' z / (n - 1)`` for an already standardized ``z``."""
    z = np.asarray(z, dtype=float)
    r = z.T @ z / (z.shape[0] - 1)
    return CorrelationMatrix((r + r.T) / 2.0)


def correlation_of(x) -> CorrelationMatrix:
    """Convenience: standardize raw indicators and estimate ``R``."""
    return sample_correlation(standardize(x))


# ---------------------------------------------------------------------------
# factorization and inversion
# ---------------------------------------------------------------------------

def ldl_pivots(a) -> np.ndarray:
    """Diagonal of the unpivoted ``L D L'`` factorization of a symmetric matrix.

    The product of the pivots is the determinant; all pivots positive means
    the matrix is positive definite.  Elimination stops at the first exact
    zero pivot and the remaining pivots are reported as zero.
    """
    a = np.array(a, dtype=float)
    p = a.shape[0]
    d = np.zeros(p)
    for k in range(p):
        d[k] = a[k, k]
        if d[k] == 0.0:
            break
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:]) / d[k]
    return d


def determinant(a) -> float:
    return float(np.prod(ldl_pivots(_as_matrix(a))))


def is_positive_definite(a, tol: float = PIVOT_TOL) -> bool:
    return bool(np.all(ldl_pivots(_as_matrix(a)) > tol))


def regularized_inverse(r, policy: RegularizationPolicy = DEFAULT_POLICY) -> Inverse:
    """Invert a correlation matrix, adding a small ridge when it is near-singular.

    If ``det(R) <= policy.det_threshold`` a ridge of ``policy.ridge`` is
    added to the diagonal.  The inverse is accepted once the inverted
    matrix is positive definite and ``max|M M^-1 - I| < residual_tol``;
    otherwise another ridge is added, up to ``policy.max_ridge_steps``.

    Raises
    ------
    SingularAfterRegularization
        If no acceptable inverse is found within the ridge budget.
    """
    m = np.array(_as_matrix(r), dtype=float)
    p = m.shape[0]
    if m.shape != (p, p):
        raise DimensionMismatch(f"matrix must be square, got {m.shape}")
    eye = np.eye(p)
    steps = 0
    det = determinant(m)
    if det <= policy.det_threshold:
        m = m + policy.ridge * eye
        steps = 1
    while True:
        pivots = ldl_pivots(m)
        det = float(np.prod(pivots))
        if np.all(pivots > policy.pivot_tol):
            inv = np.linalg.solve(m, eye)
            inv = (inv + inv.T) / 2.0
            if np.all(np.isfinite(inv)) and np.max(np.abs(m @ inv - eye)) < policy.residual_tol:
                return Inverse(values=inv, inverted=m, determinant=det, ridge_steps=steps)
        if steps >= policy.max_ridge_steps:
            raise SingularAfterRegularization(
                f"matrix still singular after {steps} ridge step(s) (det={det:.3g})"
            )
        m = m + policy.ridge * eye
        steps += 1


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------

def weighted_sum_variance(w, s) -> float:
    """Variance of ``sum_i w_i x_i`` given the covariance matrix ``s`` of ``x``."""
    w = np.asarray(w, dtype=float).reshape(-1)
    s = _as_matrix(s, "covariance")
    if s.shape != (w.size, w.size):
        raise DimensionMismatch(f"{w.size} weights do not fit a {s.shape} covariance matrix")
    return float(w @ s @ w)


def _check_inputs(z, r: np.ndarray, spec: WeightSpec):
    p = r.shape[0]
    if r.shape != (p, p):
        raise DimensionMismatch(f"correlation matrix must be square, got {r.shape}")
    if spec.p != p:
        raise DimensionMismatch(f"{spec.p} weights for {p} indicators")
    if z is None:
        return None
    z = np.asarray(z, dtype=float)
    if z.ndim != 2 or z.shape[1] != p:
        raise DimensionMismatch(f"score matrix of shape {z.shape} does not match {p} indicators")
    return z


def analytic_composite(z, r, spec: WeightSpec) -> CompositeResult:
    """Weighted sum of standardized indicators, rescaled to unit variance.

    Parameters
    ----------
    z : ndarray (n, p) or None
        Standardized indicators.  ``None`` computes diagnostics only.
    r : CorrelationMatrix or ndarray (p, p)
        Indicator correlations (sample or population).
    spec : WeightSpec
        A priori variance targets.
    """
    r = _as_matrix(r)
    z = _check_inputs(z, r, spec)
    w = spec.weights
    q = weighted_sum_variance(w, r)
    if q <= DEGENERATE_TOL:
        raise DegenerateVariance(f"W'RW = {q:.3g} is not positive")
    scale = q ** -0.5
    v = w * scale
    return CompositeResult(
        kind=CompositeKind.ANALYTIC,
        effective_weights=v,
        indicator_correlations=r @ v,
        composite_variance=q,
        scores=None if z is None else z @ v,
    )


def purely_analytic_composite(
    z, r, spec: WeightSpec, policy: RegularizationPolicy = DEFAULT_POLICY
) -> CompositeResult:
    """Composite whose variance shares equal the a priori targets exactly.

    The effective weights are ``R^-1 W (W' R^-1 W)^(-1/2)`` and the
    indicator correlations ``W (W' R^-1 W)^(-1/2)``.  When the inverse
    needed a ridge, ``regularized`` is set and the identities hold for the
    ridged matrix.
    """
    r = _as_matrix(r)
    z = _check_inputs(z, r, spec)
    inverse = regularized_inverse(r, policy)
    w = spec.weights
    q = float(w @ inverse.values @ w)
    if q <= DEGENERATE_TOL:
        raise DegenerateVariance(f"W'R^-1W = {q:.3g} is not positive")
    scale = q ** -0.5
    v = inverse.values @ w * scale
    return CompositeResult(
        kind=CompositeKind.PURELY_ANALYTIC,
        effective_weights=v,
        indicator_correlations=w * scale,
        composite_variance=q,
        scores=None if z is None else z @ v,
        regularized=inverse.regularized,
    )


def compare_composites(z, r, spec: WeightSpec, policy: RegularizationPolicy = DEFAULT_POLICY):
    """Both composite kinds for the same data, analytic first."""
    return analytic_composite(z, r, spec), purely_analytic_composite(z, r, spec, policy)


def contribution_report(result: CompositeResult) -> list[ReportRow]:
    """One row per indicator: correlation, variance share, share relative to the smallest."""
    return [
        ReportRow(i, float(c), float(v), float(rel))
        for i, (c, v, rel) in enumerate(
            zip(
                result.indicator_correlations,
                result.variance_contributions,
                result.relative_contributions,
            )
        )
    ]
