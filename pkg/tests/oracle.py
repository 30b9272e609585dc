"""Brute-force reference implementations used only by the tests.

Everything here follows the defining formulas literally with nested loops
over triples, independent of the vectorized production code paths.
"""

import numpy as np


def brute_focus(D, x, y):
    n = D.shape[0]
    return {z for z in range(n) if D[z, x] <= D[y, x] or D[z, y] <= D[x, y]}


def brute_indicator(D, w, x, y):
    if D[w, x] < D[w, y]:
        return 1.0
    if D[w, x] == D[w, y]:
        return 0.5
    return 0.0


def brute_cohesion(D):
    n = D.shape[0]
    C = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            if y == x:
                continue
            focus = brute_focus(D, x, y)
            for w in focus:
                C[x, w] += brute_indicator(D, w, x, y) / len(focus)
    return C / (n - 1)


def brute_threshold(D):
    C = brute_cohesion(D)
    return np.trace(C) / (2 * D.shape[0])


def random_dissimilarity(rng, n, d=None, kind="uniform"):
    d = d or rng.integers(1, 6)
    if kind == "uniform":
        pts = rng.random((n, d))
    else:
        pts = rng.normal(size=(n, d))
    diff = pts[:, None, :] - pts[None, :, :]
    D = np.sqrt((diff**2).sum(axis=2))
    return pts, D
