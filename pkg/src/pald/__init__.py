"""Exact partitioned local depth with a queryable cohesion cache.

Batch construction pays O(n^3) once; each test point is then related to
the reference cohesion network in O(n^2), including the updated natural
threshold, strong neighborhood, and outlier flag.  Anomaly scoring and
semi-supervised classification build on the same query.
"""

from .cache import (
    CohesionCache,
    QueryOutcome,
    build_cache,
    cohesion_from_new,
    cohesion_to_new,
    dissimilarity_to_reference,
    lazy_network,
    load_cache,
    query,
    save_cache,
    updated_threshold,
)
from .core import (
    CohesionNetwork,
    LocalFocus,
    cohesion_matrix,
    cohesion_network,
    local_focus,
    natural_threshold,
    strong_components,
)
from .dissim import load_distances_csv, load_points_csv, pairwise_dissimilarity
from .generalized import (
    RelevanceTensor,
    SupportTensor,
    fuse_dissimilarities,
    generalized_cohesion,
    generalized_marginal_threshold,
    generalized_sizes,
    generalized_threshold,
    indicator_tensors,
)
from .tasks import (
    AnomalyScore,
    ClassScores,
    EvalReport,
    anomaly_score,
    classify,
    cross_validate_classify,
    decision_boundary_grid,
    evaluate_anomaly,
    knn_anomaly_score,
    knn_classify,
    pr_auc,
    roc_auc,
    stratified_kfold,
)

__version__ = "0.1.0"
