"""Generalized cohesion machinery over probabilistic relevance and support.

Focus membership generalizes to a local relevance R[x,y,z] in [0,1] and
the support indicator to a support division Q[x,y,z] with
Q[x,y,z] + Q[y,x,z] = 1.  Weighted votes across several dissimilarities
produce fractional tensors; the focus-size threshold and its marginal
update carry over with V[x,y] = sum_z R[x,y,z].

Tensors are stored densely, so n is capped at 512.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dissim
from .errors import BadWeights, SizeMismatch, TensorTooLarge

MAX_DENSE_N = 512

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class RelevanceTensor:
    n: int
    R: np.ndarray  # R[x, y, z]; planes with x == y are unused and zeroed

    def __post_init__(self):
        _check_shape(self.n, self.R)
        off = ~np.eye(self.n, dtype=bool)
        if np.any(self.R < 0) or np.any(self.R > 1):
            raise ValueError("relevance values must lie in [0, 1]")
        if not np.allclose(self.R, self.R.transpose(1, 0, 2)):
            raise ValueError("relevance must satisfy R[x,y,z] = R[y,x,z]")
        x, y = np.nonzero(off)
        if not np.allclose(self.R[x, y, x], 1.0):
            raise ValueError("each endpoint is fully relevant: R[x,y,x] = 1")


@dataclass(frozen=True)
class SupportTensor:
    n: int
    Q: np.ndarray

    def __post_init__(self):
        _check_shape(self.n, self.Q)
        off = ~np.eye(self.n, dtype=bool)
        if np.any(self.Q < 0) or np.any(self.Q > 1):
            raise ValueError("support values must lie in [0, 1]")
        x, y = np.nonzero(off)
        if not np.allclose(self.Q[x, y, :] + self.Q[y, x, :], 1.0):
            raise ValueError("support must split: Q[x,y,z] + Q[y,x,z] = 1")
        if not np.allclose(self.Q[x, y, x], 1.0):
            raise ValueError("each point fully supports itself: Q[z,y,z] = 1")


def _check_shape(n: int, T: np.ndarray) -> None:
    if n > MAX_DENSE_N:
        raise TensorTooLarge(f"dense tensors support n <= {MAX_DENSE_N}, got {n}")
    if T.shape != (n, n, n):
        raise ValueError(f"expected shape {(n, n, n)}, got {T.shape}")


def indicator_tensors(D: np.ndarray, tie_tol: float = 0.0):
    """The degenerate (single-dissimilarity) tensors: 0/1 focus membership
    and the three-branch support indicator with 1/2 on ties."""
    D = dissim.validate_dissimilarity(D)
    n = D.shape[0]
    if n > MAX_DENSE_N:
        raise TensorTooLarge(f"dense tensors support n <= {MAX_DENSE_N}, got {n}")
    pair = D[:, :, None]  # d(x, y)
    from_x = D[:, None, :]  # d(x, z) = d(z, x)
    from_y = D[None, :, :]  # d(y, z) = d(z, y)
    R = ((from_x <= pair + tie_tol) | (from_y <= pair + tie_tol)).astype(float)
    diff = from_x - from_y  # d(z,x) - d(z,y), broadcast over pairs
    Q = 1.0 * (diff < -tie_tol) + 0.5 * (np.abs(diff) <= tie_tol)
    eye = np.eye(n, dtype=bool)
    R[eye, :] = 0.0
    Q[eye, :] = 0.0
    return RelevanceTensor(n=n, R=R), SupportTensor(n=n, Q=Q)


def fuse_dissimilarities(Ds, weights, tie_tol: float = 0.0):
    """Combine k dissimilarities by weighted vote into fractional R and Q."""
    if len(Ds) == 0:
        raise SizeMismatch("need at least one dissimilarity matrix")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(Ds),):
        raise BadWeights(f"{weights.size} weights for {len(Ds)} matrices")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > _WEIGHT_TOL:
        raise BadWeights("weights must be non-negative and sum to 1")
    n = np.asarray(Ds[0]).shape[0]
    R_acc = np.zeros((n, n, n))
    Q_acc = np.zeros((n, n, n))
    for D, w in zip(Ds, weights):
        D = np.asarray(D, dtype=float)
        if D.shape != (n, n):
            raise SizeMismatch(f"matrix of shape {D.shape} in a fusion over n={n}")
        Ri, Qi = indicator_tensors(D, tie_tol=tie_tol)
        R_acc += w * Ri.R
        Q_acc += w * Qi.Q
    return RelevanceTensor(n=n, R=R_acc), SupportTensor(n=n, Q=Q_acc)


def generalized_sizes(R: RelevanceTensor) -> np.ndarray:
    """V[x, y] = sum_z R[x, y, z]; at least 2 since both endpoints count fully."""
    V = R.R.sum(axis=2)
    np.fill_diagonal(V, 0.0)
    return V


def generalized_threshold(V: np.ndarray) -> float:
    """Focus-size form: 2n(n-1) tau = sum over ordered pairs of 1/V[x,y]."""
    n = V.shape[0]
    off = ~np.eye(n, dtype=bool)
    return float((1.0 / V[off]).sum()) / (2 * n * (n - 1))


def generalized_epsilon(R_t: np.ndarray, V: np.ndarray) -> float:
    """Correction for reference pairs whose focus partially absorbs t.

    ``R_t`` holds the relevance of t to each unordered reference pair in
    condensed order; ``V`` is the square generalized-size matrix.
    """
    n = V.shape[0]
    Vc = dissim.to_condensed(V)
    terms = R_t / ((Vc + R_t) * Vc)
    return float(terms.sum()) / (n * (n + 1))


def generalized_marginal_threshold(
    tau_s: float, self_cohesion_t: float, R_t: np.ndarray, V: np.ndarray, n: int
) -> float:
    """Marginal threshold update for the generalized setting."""
    R_t = np.asarray(R_t, dtype=float)
    if np.any(R_t < 0) or np.any(R_t > 1):
        raise ValueError("relevance of t must lie in [0, 1]")
    eps = generalized_epsilon(R_t, V)
    return tau_s * (n - 1) / (n + 1) + self_cohesion_t / (n + 1) - eps


def generalized_cohesion(R: RelevanceTensor, Q: SupportTensor) -> np.ndarray:
    """c[x, w] = mean over y != x of R[x,y,w] Q[x,y,w] / V[x,y].

    Reduces to the exact cohesion matrix when R and Q are indicators.
    """
    if R.n != Q.n:
        raise SizeMismatch(f"relevance has n={R.n}, support has n={Q.n}")
    n = R.n
    V = generalized_sizes(R)
    Vsafe = np.where(V > 0, V, 1.0)
    contrib = R.R * Q.Q / Vsafe[:, :, None]
    # y == x planes are zeroed in both tensors, so the plain sum over y is exact
    return contrib.sum(axis=1) / (n - 1)
