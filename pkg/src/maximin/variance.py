"""Residual and explained-variance functionals, population and empirical.

For a population Gram matrix S, a candidate coefficient vector beta and a
true coefficient vector b:

    residual variance   R(beta; b) = b'Sb - 2 beta'Sb + beta'S beta
    explained variance  V(beta; b) = 2 beta'Sb - beta'S beta

so that R + V = b'Sb always.  The empirical per-group counterpart replaces S
by the group Gram X_g'X_g / n_g and Sb by the cross-product X_g'Y_g / n_g.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateVariance,
    DimensionMismatch,
    EmptyGroup,
    LengthMismatch,
)
from .model import Dataset


@dataclass(frozen=True)
class SeriesReport:
    """Partial sums of per-observation cross products Y_t * Yhat_t."""

    cumsum: np.ndarray
    standardized: bool

    def __post_init__(self):
        c = np.asarray(self.cumsum, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "cumsum", c)


def _check_dims(beta, b, sigma):
    beta = np.asarray(beta, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    p = beta.shape[0]
    if beta.ndim != 1 or b.ndim != 1 or b.shape[0] != p:
        raise DimensionMismatch(f"beta {beta.shape} and b {b.shape} must be equal-length vectors")
    if sigma.shape != (p, p):
        raise DimensionMismatch(f"sigma {sigma.shape} does not match vector length {p}")
    return beta, b, sigma


def pop_residual_variance(beta, b, sigma) -> float:
    """b'Sb - 2 beta'Sb + beta'S beta, the residual variance absent noise."""
    beta, b, sigma = _check_dims(beta, b, sigma)
    diff = b - beta
    return float(diff @ sigma @ diff)


def pop_explained_variance(beta, b, sigma) -> float:
    """2 beta'Sb - beta'S beta; concave in beta for fixed b."""
    beta, b, sigma = _check_dims(beta, b, sigma)
    return float(2.0 * beta @ sigma @ b - beta @ sigma @ beta)


def emp_explained_variance(dataset: Dataset, group, beta) -> float:
    """Empirical explained variance of ``beta`` on one observation group.

    Returns (2/n_g) beta'X_g'Y_g - beta' (X_g'X_g/n_g) beta.
    """
    idx = np.asarray(group, dtype=np.int64)
    if idx.size == 0:
        raise EmptyGroup("cannot score an empty group")
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (dataset.p,):
        raise DimensionMismatch(f"beta {beta.shape} does not match p={dataset.p}")
    Xg = dataset.X[idx]
    Yg = dataset.Y[idx]
    n_g = idx.size
    xb = Xg @ beta
    return float((2.0 * xb @ Yg - xb @ xb) / n_g)


def standardize_series(v: np.ndarray) -> np.ndarray:
    """Center to mean 0 and scale to variance 1 (biased 1/n variance)."""
    v = np.asarray(v, dtype=np.float64)
    centered = v - v.mean()
    var = float(centered @ centered) / v.shape[0]
    if var <= 0.0:
        raise DegenerateVariance("series has zero variance, cannot standardize")
    return centered / np.sqrt(var)


def cumulative_cross_product(Y, Yhat, standardize: bool = False) -> SeriesReport:
    """Running sum of Y_t * Yhat_t, the drift diagnostic for regime shifts.

    With ``standardize=True`` both series are centered to mean 0 and scaled
    to biased variance 1 first, which makes the result invariant under
    positive affine maps of the predictions.
    """
    Y = np.asarray(Y, dtype=np.float64)
    Yhat = np.asarray(Yhat, dtype=np.float64)
    if Y.ndim != 1 or Yhat.ndim != 1 or Y.shape[0] != Yhat.shape[0]:
        raise LengthMismatch(f"Y has length {Y.shape[0]} but Yhat has length {Yhat.shape[0]}")
    if Y.shape[0] < 1:
        raise LengthMismatch("need at least one observation")
    if standardize:
        Y = standardize_series(Y)
        Yhat = standardize_series(Yhat)
    return SeriesReport(cumsum=np.cumsum(Y * Yhat), standardized=standardize)
