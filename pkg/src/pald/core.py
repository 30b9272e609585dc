"""Batch partitioned local depth: cohesion, symmetric weights, clustering.

For a pair (x, y), the local focus is the set of points within d(x,y) of x
or of y.  Cohesion of w to x averages, over pairs and foci, the share of
support w gives x; the symmetric weight min(c[x][y], c[y][x]) with the
natural threshold tau = mean(diag(C)) / 2 yields a parameter-free cluster
network.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import IndexOutOfRange


@dataclass(frozen=True)
class LocalFocus:
    members: frozenset
    cardinality: int


@dataclass(frozen=True)
class CohesionNetwork:
    weights: np.ndarray  # symmetric n x n
    threshold: float


def local_focus(D: np.ndarray, x: int, y: int, tie_tol: float = 0.0) -> LocalFocus:
    """Points z with d(z,x) <= d(y,x) or d(z,y) <= d(x,y); always contains x and y."""
    n = D.shape[0]
    if not (0 <= x < n and 0 <= y < n):
        raise IndexOutOfRange(f"indices ({x}, {y}) outside [0, {n})")
    if x == y:
        raise ValueError("local focus requires a pair of distinct points")
    mask = (D[x] <= D[x, y] + tie_tol) | (D[y] <= D[x, y] + tie_tol)
    members = frozenset(np.flatnonzero(mask).tolist())
    return LocalFocus(members=members, cardinality=len(members))


def _accumulate_rows(D: np.ndarray, C: np.ndarray, xs: range, tie_tol: float) -> None:
    # One scan per unordered pair (x, y), y > x: the focus and its size are
    # shared, and support splits as I(w,y,x) = 1 - I(w,x,y).
    n = D.shape[0]
    for x in xs:
        if x >= n - 1:
            continue
        dx = D[x]
        dy = D[x + 1 :]  # rows d(y, .) for y > x
        dxy = dx[x + 1 :, None]  # d(x, y)
        member = (dx[None, :] <= dxy + tie_tol) | (dy <= dxy + tie_tol)
        sizes = member.sum(axis=1)
        diff = dx[None, :] - dy  # d(w,x) - d(w,y)
        toward_x = (diff < -tie_tol) + 0.5 * (np.abs(diff) <= tie_tol)
        share = member / sizes[:, None]
        C[x] += (share * toward_x).sum(axis=0)
        C[x + 1 :] += share * (1.0 - toward_x)


def cohesion_matrix(D: np.ndarray, tie_tol: float = 0.0, threads: int = 1) -> np.ndarray:
    """Exact cohesion matrix C with C[x, w] the cohesion of w to x.

    ``threads`` > 1 partitions the unordered pairs across workers with
    private accumulators merged by addition; output matches the serial
    order up to float summation reordering.
    """
    n = D.shape[0]
    C = np.zeros((n, n))
    if threads <= 1 or n < 64:
        _accumulate_rows(D, C, range(n - 1), tie_tol)
    else:
        chunks = [range(i, n - 1, threads) for i in range(threads)]
        parts = [np.zeros((n, n)) for _ in chunks]

        def work(part, xs):
            _accumulate_rows(D, part, xs, tie_tol)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, parts, chunks))
        for part in parts:
            C += part
    C /= n - 1
    return C


def natural_threshold(C: np.ndarray) -> float:
    """Half the mean self-cohesion: the parameter-free strong-tie cutoff."""
    n = C.shape[0]
    return float(np.trace(C)) / (2 * n)


def cohesion_network(C: np.ndarray) -> CohesionNetwork:
    weights = np.minimum(C, C.T)
    np.fill_diagonal(weights, 0.0)
    return CohesionNetwork(weights=weights, threshold=natural_threshold(C))


def strong_components(network: CohesionNetwork) -> list:
    """Connected components of the strong-tie subnetwork (weight >= threshold).

    Returns a list of clusters, each a sorted list of indices; points with no
    strong ties form singletons.
    """
    strong = network.weights >= network.threshold
    np.fill_diagonal(strong, False)
    n_comp, labels = connected_components(csr_matrix(strong), directed=False)
    clusters = [[] for _ in range(n_comp)]
    for idx, lab in enumerate(labels):
        clusters[lab].append(idx)
    return sorted(clusters, key=lambda c: c[0])
