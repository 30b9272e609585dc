"""Applications built on the cohesion cache: online anomaly scoring and
semi-supervised classification, with knn baselines and AUC metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from . import cache as cachemod
from . import dissim
from .errors import (
    DegenerateLabels,
    KTooLarge,
    NoLabels,
    NotTwoDimensional,
    TooFewSamples,
    UnknownMethod,
)

METHODS = ("count_to", "sum_to", "max_to", "count_from", "sum_from", "max_from")


@dataclass(frozen=True)
class AnomalyScore:
    raw: float  # higher = more normal
    rank_score: float  # negated, so higher = more anomalous

    @property
    def is_outlier(self) -> bool:
        return self.raw == 0.0


@dataclass(frozen=True)
class ClassScores:
    per_class: dict
    method: str
    predicted: object
    tie: bool = False


@dataclass(frozen=True)
class EvalReport:
    roc_auc: float | None = None
    pr_auc: float | None = None
    accuracy: float | None = None
    per_fold: list = field(default_factory=list)


def anomaly_score(cache_over_normals: cachemod.CohesionCache, t) -> AnomalyScore:
    """Maximal symmetric cohesion weight between t and the normal reference set.

    The cache must be built over normal points only; a score of zero means t
    forms its own singleton relative to them.
    """
    out = cachemod.query(cache_over_normals, t)
    raw = float(np.minimum(out.cohesion_to, out.cohesion_from).max())
    return AnomalyScore(raw=raw, rank_score=-raw)


def knn_anomaly_score(points: np.ndarray, t, k: int = 5, metric: str = "euclidean") -> float:
    """Distance from t to its k-th nearest reference point (higher = more anomalous)."""
    points = np.asarray(points, dtype=float)
    if k > points.shape[0]:
        raise KTooLarge(f"k={k} but only {points.shape[0]} reference points")
    dists = dissim.point_distances(points, t, metric=metric)
    return float(np.sort(dists)[k - 1])


def _check_binary(labels) -> np.ndarray:
    y = np.asarray(labels, dtype=float)
    if not (np.any(y == 1) and np.any(y == 0)):
        raise DegenerateLabels("need at least one positive and one negative label")
    return y


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC: P(random positive outranks random negative), ties 1/2."""
    y = _check_binary(labels)
    s = np.asarray(scores, dtype=float)
    ranks = rankdata(s)  # midranks on ties
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def pr_auc(scores, labels) -> float:
    """Average precision: precision summed over recall increments, descending
    score thresholds, tied scores handled as one threshold group."""
    y = _check_binary(labels)
    s = np.asarray(scores, dtype=float)
    order = np.argsort(-s, kind="stable")
    y = y[order]
    s = s[order]
    n_pos = y.sum()
    tp = np.cumsum(y)
    fp = np.cumsum(1 - y)
    # keep only the last entry of each tied-score group
    last = np.append(s[1:] != s[:-1], True)
    tp, fp = tp[last], fp[last]
    precision = tp / (tp + fp)
    recall = tp / n_pos
    return float(np.sum(np.diff(np.append(0.0, recall)) * precision))


def classify(cache: cachemod.CohesionCache, t, method: str = "count_to") -> ClassScores:
    """Score each class by its association with t and pick the strongest.

    "to" methods use the cohesion of t to the reference points (the query's
    cohesion_from vector); "from" methods use cohesion of reference points
    to t.  Count and sum only consider values at or above the updated
    threshold; max takes the class-wise maximum unconditionally.
    """
    if cache.labels is None:
        raise NoLabels("classification needs a cache built with labels")
    if method not in METHODS:
        raise UnknownMethod(f"method must be one of {METHODS}, got {method!r}")
    out = cachemod.query(cache, t)
    values = out.cohesion_from if method.endswith("_to") else out.cohesion_to
    labels = np.asarray(cache.labels)
    classes = sorted(set(cache.labels), key=str)
    per_class = {}
    for cls in classes:
        v = values[labels == cls]
        if method.startswith("count"):
            per_class[cls] = float((v >= out.tau_updated).sum())
        elif method.startswith("sum"):
            per_class[cls] = float(v[v >= out.tau_updated].sum())
        else:
            per_class[cls] = float(v.max())
    best = max(per_class.values())
    winners = [cls for cls in classes if per_class[cls] == best]
    return ClassScores(per_class=per_class, method=method, predicted=winners[0], tie=len(winners) > 1)


def knn_classify(points, labels, t, k: int = 5, metric: str = "euclidean") -> ClassScores:
    """Majority label among the k nearest reference points."""
    points = np.asarray(points, dtype=float)
    if k > points.shape[0]:
        raise KTooLarge(f"k={k} but only {points.shape[0]} reference points")
    dists = dissim.point_distances(points, t, metric=metric)
    nearest = np.argsort(dists, kind="stable")[:k]
    labels = np.asarray(labels)
    classes = sorted(set(labels.tolist()), key=str)
    counts = {cls: int((labels[nearest] == cls).sum()) for cls in classes}
    best = max(counts.values())
    winners = [cls for cls in classes if counts[cls] == best]
    return ClassScores(per_class={c: float(v) for c, v in counts.items()},
                       method="knn", predicted=winners[0], tie=len(winners) > 1)


def stratified_kfold(labels, k_folds: int = 10, seed: int = 0) -> list:
    """Deterministic stratified partition into k test folds.

    Each class is shuffled and dealt cyclically, continuing a global fold
    cursor across classes so both per-class and total fold sizes differ by
    at most one.  Returns (train_indices, test_indices) pairs.
    """
    labels = np.asarray(labels)
    n = labels.size
    if k_folds < 2 or k_folds > n:
        raise TooFewSamples(f"cannot make {k_folds} folds from {n} samples")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k_folds)]
    cursor = 0
    for cls in sorted(set(labels.tolist()), key=str):
        members = np.flatnonzero(labels == cls)
        rng.shuffle(members)
        for idx in members:
            folds[cursor % k_folds].append(int(idx))
            cursor += 1
    all_idx = set(range(n))
    out = []
    for test in folds:
        test_sorted = sorted(test)
        train_sorted = sorted(all_idx - set(test))
        out.append((train_sorted, test_sorted))
    return out


def cross_validate_classify(points, labels, method: str = "count_to",
                            k_folds: int = 10, seed: int = 0,
                            metric: str = "euclidean", tie_tol: float = 0.0) -> EvalReport:
    """10-fold style evaluation: each point is classified exactly once against
    a cache built from the remaining folds."""
    points = np.asarray(points, dtype=float)
    labels = list(labels)
    folds = stratified_kfold(labels, k_folds=k_folds, seed=seed)
    per_fold = []
    correct = total = 0
    for train_idx, test_idx in folds:
        train_pts = points[train_idx]
        train_labels = [labels[i] for i in train_idx]
        D = dissim.pairwise_dissimilarity(train_pts, metric=metric)
        fold_cache = cachemod.build_cache(D, labels=train_labels, points=train_pts,
                                          metric=metric, tie_tol=tie_tol)
        fold_correct = 0
        for i in test_idx:
            if method == "knn":
                pred = knn_classify(train_pts, train_labels, points[i], metric=metric)
            else:
                pred = classify(fold_cache, points[i], method=method)
            if pred.predicted == labels[i]:
                fold_correct += 1
        per_fold.append(fold_correct / len(test_idx))
        correct += fold_correct
        total += len(test_idx)
    return EvalReport(accuracy=correct / total, per_fold=per_fold)


def evaluate_anomaly(normal_points, test_points, test_labels, scorer: str = "pald",
                     k: int = 5, metric: str = "euclidean", tie_tol: float = 0.0) -> EvalReport:
    """Score every test point against the normal reference set and report AUCs.

    ``test_labels`` are 0/1 with 1 = anomaly; scores are oriented so higher
    means more anomalous for both scorers.
    """
    normal_points = np.asarray(normal_points, dtype=float)
    if scorer == "pald":
        D = dissim.pairwise_dissimilarity(normal_points, metric=metric)
        ref = cachemod.build_cache(D, points=normal_points, metric=metric, tie_tol=tie_tol)
        scores = [anomaly_score(ref, t).rank_score for t in np.asarray(test_points, dtype=float)]
    elif scorer == "knn":
        scores = [knn_anomaly_score(normal_points, t, k=k, metric=metric)
                  for t in np.asarray(test_points, dtype=float)]
    else:
        raise UnknownMethod(f"scorer must be 'pald' or 'knn', got {scorer!r}")
    return EvalReport(roc_auc=roc_auc(scores, test_labels), pr_auc=pr_auc(scores, test_labels))


def decision_boundary_grid(cache: cachemod.CohesionCache, bounds, steps,
                           method: str = "count_to") -> list:
    """Classify every cell of a 2-d grid, marking cells whose strong
    neighborhood is empty as unclassified (None).

    ``bounds`` is (xmin, xmax, ymin, ymax); ``steps`` is the cell count per
    axis (int or pair).  Returns records (x, y, predicted-or-None).
    """
    if cache.points is None or cache.points.shape[1] != 2:
        raise NotTwoDimensional("boundary grids need 2-d reference points")
    xmin, xmax, ymin, ymax = bounds
    nx, ny = (steps, steps) if np.isscalar(steps) else steps
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    records = []
    for gy in ys:
        for gx in xs:
            out = cachemod.query(cache, (gx, gy))
            if out.is_outlier:
                records.append((float(gx), float(gy), None))
            else:
                pred = classify(cache, (gx, gy), method=method)
                records.append((float(gx), float(gy), pred.predicted))
    return records
