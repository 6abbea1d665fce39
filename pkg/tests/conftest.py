import numpy as np
import pytest


def random_correlation(rng, p, extra=None):
    """Random positive-definite correlation matrix from a factor product.

    Independent of the package's own generator.
    """
    k = p + (extra if extra is not None else rng.integers(1, 5))
    a = rng.standard_normal((p, k))
    s = a @ a.T
    d = 1.0 / np.sqrt(np.diag(s))
    r = s * np.outer(d, d)
    r = (r + r.T) / 2.0
    np.fill_diagonal(r, 1.0)
    return r


def corr_columns_with(z, scores):
    """Pearson correlation of every column of ``z`` with ``scores``, computed directly."""
    return np.array([np.corrcoef(z[:, j], scores)[0, 1] for j in range(z.shape[1])])


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def r3():
    return np.array([[1.0, 0.8, 0.2], [0.8, 1.0, 0.2], [0.2, 0.2, 1.0]])
