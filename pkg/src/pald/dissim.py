"""Pairwise dissimilarity construction and validation.

Dissimilarity matrices are symmetric with zero diagonal and strictly
positive off-diagonal entries.  Triangular (condensed) storage follows the
scipy convention: ``condensed[k]`` holds the entry for the k-th unordered
pair in row-major upper-triangular order.
"""

from __future__ import annotations

import io

import numpy as np
import pandas as pd
from scipy.spatial.distance import pdist, squareform

from .errors import DimensionMismatch, DuplicatePoints, NegativeEntry, NonSymmetric

METRICS = ("euclidean", "manhattan", "precomputed")

_METRIC_MAP = {"euclidean": "euclidean", "manhattan": "cityblock"}


def pairwise_dissimilarity(points, metric: str = "euclidean") -> np.ndarray:
    """Build a validated n x n dissimilarity matrix.

    With ``metric="precomputed"``, ``points`` is itself an n x n matrix and is
    validated rather than recomputed.  Raises DuplicatePoints when any
    off-diagonal dissimilarity is zero.
    """
    if metric == "precomputed":
        return validate_dissimilarity(np.asarray(points, dtype=float))
    if metric not in _METRIC_MAP:
        raise ValueError(f"unknown metric {metric!r}")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    condensed = pdist(pts, metric=_METRIC_MAP[metric])
    if np.any(condensed == 0.0):
        raise DuplicatePoints("identical points yield zero dissimilarity")
    return squareform(condensed)


def validate_dissimilarity(values: np.ndarray) -> np.ndarray:
    """Check symmetry, zero diagonal and positive off-diagonal entries."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {values.shape}")
    if values.shape[0] < 2:
        raise ValueError("need at least two points")
    if np.any(values < 0):
        raise NegativeEntry("dissimilarities must be non-negative")
    if not np.array_equal(values, values.T):
        raise NonSymmetric("dissimilarity matrix must be symmetric")
    if np.any(np.diag(values) != 0.0):
        raise ValueError("diagonal must be zero")
    off = values + np.eye(values.shape[0])
    if np.any(off == 0.0):
        raise DuplicatePoints("zero off-diagonal dissimilarity (duplicate points)")
    return values


def point_distances(points: np.ndarray, t, metric: str = "euclidean") -> np.ndarray:
    """Vector of dissimilarities from test point ``t`` to every row of ``points``."""
    if metric not in _METRIC_MAP:
        raise ValueError(f"unknown metric {metric!r}")
    pts = np.asarray(points, dtype=float)
    t = np.asarray(t, dtype=float).ravel()
    if t.shape[0] != pts.shape[1]:
        raise DimensionMismatch(f"point has dimension {t.shape[0]}, reference has {pts.shape[1]}")
    diff = pts - t[None, :]
    if metric == "euclidean":
        return np.sqrt((diff**2).sum(axis=1))
    return np.abs(diff).sum(axis=1)


def to_condensed(square: np.ndarray) -> np.ndarray:
    return squareform(np.asarray(square), checks=False)


def to_square(condensed: np.ndarray) -> np.ndarray:
    return squareform(np.asarray(condensed))


def load_points_csv(path_or_buf):
    """Read a points CSV: rows are points, optional header, optional 'label' column.

    Returns (points, labels, feature_names); labels is None when no label
    column is present.
    """
    if isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "read"):
        raw = pd.read_csv(path_or_buf, header=None, dtype=str)
    else:
        raw = pd.read_csv(io.StringIO(str(path_or_buf)), header=None, dtype=str)
    first = raw.iloc[0]
    has_header = not all(_is_number(v) for v in first)
    if has_header:
        names = [str(v) for v in first]
        body = raw.iloc[1:].reset_index(drop=True)
    else:
        names = [f"f{i}" for i in range(raw.shape[1])]
        body = raw
    labels = None
    lowered = [n.lower() for n in names]
    for label_col in ("label", "anomaly"):
        if label_col in lowered:
            idx = lowered.index(label_col)
            labels = body.iloc[:, idx].tolist()
            body = body.drop(columns=body.columns[idx])
            names = names[:idx] + names[idx + 1 :]
            break
    points = body.to_numpy(dtype=float)
    return points, labels, names


def load_distances_csv(path) -> np.ndarray:
    """Read a square precomputed-dissimilarity CSV and validate it."""
    values = pd.read_csv(path, header=None).to_numpy(dtype=float)
    return validate_dissimilarity(values)


def _is_number(v) -> bool:
    try:
        float(v)
        return True
    except (TypeError, ValueError):
        return False
