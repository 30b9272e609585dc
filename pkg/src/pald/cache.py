"""Queryable cohesion cache: O(n^3) build, O(n^2) per-test-point queries.

The cache stores, for the fixed reference set S, the cardinality of every
local focus plus the reference dissimilarities and threshold.  A query for
a test point t then extends the cohesion network to T = S + {t} without
recomputing anything over pairs internal to S: cohesion to t needs no
cached data at all, cohesion from t reuses the cached focus sizes, and the
threshold is updated by a marginal formula whose correction term accounts
for the reference foci that absorb t.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import dissim
from .errors import DimensionMismatch, DuplicatePoints, FormatError

FORMAT_VERSION = 1
_MAGIC = "PALDCACHE"


@dataclass
class CohesionCache:
    n: int
    V: np.ndarray  # condensed upper-triangular focus cardinalities, int
    tau_ref: float
    D: np.ndarray  # condensed upper-triangular dissimilarities
    labels: list | None = None
    points: np.ndarray | None = None  # optional, kept in memory only
    metric: str = "euclidean"
    tie_tol: float = 0.0
    built_at: float = field(default_factory=time.time)
    format_version: int = FORMAT_VERSION
    _dense: dict = field(default_factory=dict, repr=False)

    def d_square(self) -> np.ndarray:
        if "D" not in self._dense:
            self._dense["D"] = dissim.to_square(self.D)
        return self._dense["D"]

    def v_square(self) -> np.ndarray:
        if "V" not in self._dense:
            self._dense["V"] = dissim.to_square(self.V).astype(np.int64)
        return self._dense["V"]


@dataclass(frozen=True)
class QueryOutcome:
    cohesion_to: np.ndarray  # c[t][w]: cohesion of each reference w to t
    self_cohesion: float  # c[t][t]
    cohesion_from: np.ndarray  # c[w][t]: cohesion of t to each reference w
    epsilon: float
    tau_updated: float
    tau_ref: float
    strong_neighbors: frozenset
    is_outlier: bool


def build_cache(
    D: np.ndarray,
    labels=None,
    points: np.ndarray | None = None,
    metric: str = "euclidean",
    tie_tol: float = 0.0,
    threads: int = 1,
) -> CohesionCache:
    """Count every local focus over the validated dissimilarity matrix ``D``."""
    D = dissim.validate_dissimilarity(D)
    n = D.shape[0]
    if labels is not None and len(labels) != n:
        raise DimensionMismatch(f"{len(labels)} labels for {n} points")
    V = np.empty(n * (n - 1) // 2, dtype=np.int64)
    pos = 0
    for x in range(n - 1):
        dxy = D[x, x + 1 :, None]
        member = (D[x][None, :] <= dxy + tie_tol) | (D[x + 1 :] <= dxy + tie_tol)
        sizes = member.sum(axis=1)
        V[pos : pos + sizes.size] = sizes
        pos += sizes.size
    # focus-size form of the threshold: 2n(n-1) tau = sum over ordered pairs of 1/V
    tau_ref = float((1.0 / V).sum()) / (n * (n - 1))
    pts = None if points is None else np.asarray(points, dtype=float)
    return CohesionCache(
        n=n,
        V=V,
        tau_ref=tau_ref,
        D=dissim.to_condensed(D),
        labels=list(labels) if labels is not None else None,
        points=pts,
        metric=metric,
        tie_tol=tie_tol,
    )


def dissimilarity_to_reference(cache: CohesionCache, t) -> np.ndarray:
    """Dissimilarities from a test point to every reference point.

    ``t`` is either a raw point (when the cache retains reference points) or
    a precomputed length-n vector.  Duplicates of reference points are
    rejected, as in batch construction.
    """
    t = np.asarray(t, dtype=float).ravel()
    if cache.points is not None and t.shape[0] == cache.points.shape[1]:
        dt = dissim.point_distances(cache.points, t, metric=cache.metric)
    elif t.shape[0] == cache.n:
        dt = t
    else:
        raise DimensionMismatch(
            f"test point has length {t.shape[0]}; expected reference dimension "
            f"or a precomputed vector of length {cache.n}"
        )
    if np.any(dt < 0):
        raise DimensionMismatch("dissimilarities must be non-negative")
    if np.any(dt == 0.0):
        raise DuplicatePoints("test point duplicates a reference point")
    return dt


def cohesion_to_new(cache: CohesionCache, dt: np.ndarray):
    """Cohesion of every w in T to the test point t; no cached data needed.

    Returns (cohesion_to, self_cohesion) where cohesion_to[w] = c[t][w] for
    the n reference points and self_cohesion = c[t][t].
    """
    n, tol = cache.n, cache.tie_tol
    Dsq = cache.d_square()
    d_t = np.append(dt, 0.0)  # d(z, t) for z in T, t last
    Dext = np.hstack([Dsq, dt[:, None]])  # d(y, z) for y in S, z in T
    member = (d_t[None, :] <= dt[:, None] + tol) | (Dext <= dt[:, None] + tol)
    sizes = member.sum(axis=1)
    diff = d_t[None, :] - Dext  # d(w,t) - d(w,y)
    support = (diff < -tol) + 0.5 * (np.abs(diff) <= tol)
    vals = (member * support / sizes[:, None]).sum(axis=0) / n
    return vals[:n], float(vals[n])


def cohesion_from_new(cache: CohesionCache, dt: np.ndarray):
    """Cohesion of t to every reference w, plus the threshold correction.

    Uses the cached focus sizes: |U[w,y] over T| = V[w,y] + 1 exactly when t
    joins the reference focus.  epsilon aggregates 1/((V+1)V) over the
    ordered reference pairs whose focus absorbs t.
    """
    n, tol = cache.n, cache.tie_tol
    Dsq = cache.d_square()
    Vsq = cache.v_square().astype(float)
    off = ~np.eye(n, dtype=bool)
    joins = (dt[:, None] <= Dsq + tol) | (dt[None, :] <= Dsq + tol)
    joins &= off
    VT = Vsq + joins
    np.fill_diagonal(VT, 1.0)  # excluded below; avoids 0/0
    diff = dt[:, None] - dt[None, :]  # d(t,w) - d(t,y)
    support = (diff < -tol) + 0.5 * (np.abs(diff) <= tol)
    terms = np.where(off, joins * support / VT, 0.0)
    cohesion_from = terms.sum(axis=1) / n
    with np.errstate(divide="ignore"):
        eps_terms = np.where(off, joins / ((Vsq + 1.0) * np.where(off, Vsq, 1.0)), 0.0)
    epsilon = float(eps_terms.sum()) / (2 * n * (n + 1))
    return cohesion_from, epsilon


def updated_threshold(cache: CohesionCache, self_cohesion: float, epsilon: float) -> float:
    """Marginal update of the natural threshold when extending S by one point."""
    n = cache.n
    return cache.tau_ref * (n - 1) / (n + 1) + self_cohesion / (n + 1) - epsilon


def query(cache: CohesionCache, t) -> QueryOutcome:
    """Full O(n^2) online query: both cohesion directions, updated threshold,
    strong neighborhood, and outlier flag for a single test point."""
    dt = dissimilarity_to_reference(cache, t)
    cohesion_to, self_cohesion = cohesion_to_new(cache, dt)
    cohesion_from, epsilon = cohesion_from_new(cache, dt)
    tau_t = updated_threshold(cache, self_cohesion, epsilon)
    weights = np.minimum(cohesion_to, cohesion_from)
    neighbors = frozenset(np.flatnonzero(weights >= tau_t).tolist())
    return QueryOutcome(
        cohesion_to=cohesion_to,
        self_cohesion=self_cohesion,
        cohesion_from=cohesion_from,
        epsilon=epsilon,
        tau_updated=tau_t,
        tau_ref=cache.tau_ref,
        strong_neighbors=neighbors,
        is_outlier=not neighbors,
    )


def lazy_network(cache: CohesionCache) -> np.ndarray:
    """Reference cohesion matrix recomputed from the cache.

    Focus membership is re-derived from the stored dissimilarities but the
    cardinalities come from the cache, skipping the counting pass.
    """
    n, tol = cache.n, cache.tie_tol
    Dsq = cache.d_square()
    Vsq = cache.v_square()
    C = np.zeros((n, n))
    for x in range(n - 1):
        dx = Dsq[x]
        dy = Dsq[x + 1 :]
        dxy = dx[x + 1 :, None]
        member = (dx[None, :] <= dxy + tol) | (dy <= dxy + tol)
        sizes = Vsq[x, x + 1 :]
        diff = dx[None, :] - dy
        toward_x = (diff < -tol) + 0.5 * (np.abs(diff) <= tol)
        share = member / sizes[:, None]
        C[x] += (share * toward_x).sum(axis=0)
        C[x + 1 :] += share * (1.0 - toward_x)
    C /= n - 1
    return C


def save_cache(cache: CohesionCache, path) -> None:
    """Write the text cache format (round-trips V exactly, floats to 17 digits)."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{_MAGIC} v{cache.format_version}\n")
        fh.write(f"n={cache.n}\n")
        fh.write(f"tau={cache.tau_ref:.17g}\n")
        pos = 0
        for x in range(cache.n - 1):
            row_len = cache.n - 1 - x
            fh.write(" ".join(str(int(v)) for v in cache.V[pos : pos + row_len]) + "\n")
            pos += row_len
        pos = 0
        for x in range(cache.n - 1):
            row_len = cache.n - 1 - x
            fh.write(" ".join(f"{v:.17g}" for v in cache.D[pos : pos + row_len]) + "\n")
            pos += row_len
        if cache.labels is not None:
            fh.write("labels:\n")
            for lab in cache.labels:
                fh.write(f"{lab}\n")


def load_cache(path) -> CohesionCache:
    with open(path, encoding="ascii") as fh:
        lines = fh.read().split("\n")
    it = iter(enumerate(lines, start=1))

    def next_line():
        try:
            return next(it)
        except StopIteration:
            raise FormatError("truncated cache file") from None

    lineno, header = next_line()
    parts = header.split()
    if len(parts) != 2 or parts[0] != _MAGIC or not parts[1].startswith("v"):
        raise FormatError(f"line {lineno}: not a cache file")
    if parts[1] != f"v{FORMAT_VERSION}":
        raise FormatError(f"line {lineno}: unsupported version {parts[1]}")
    lineno, nline = next_line()
    if not nline.startswith("n="):
        raise FormatError(f"line {lineno}: expected n=<int>")
    n = int(nline[2:])
    lineno, tline = next_line()
    if not tline.startswith("tau="):
        raise FormatError(f"line {lineno}: expected tau=<real>")
    tau_ref = float(tline[4:])

    def read_triangle(dtype):
        out = []
        for x in range(n - 1):
            lineno, row = next_line()
            vals = row.split()
            if len(vals) != n - 1 - x:
                raise FormatError(f"line {lineno}: expected {n - 1 - x} values, got {len(vals)}")
            try:
                out.extend(dtype(v) for v in vals)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
        return out

    V = np.array(read_triangle(int), dtype=np.int64)
    D = np.array(read_triangle(float))
    labels = None
    for lineno, line in it:
        if line == "labels:":
            labels = [lab for _, lab in it if lab != ""]
        elif line.strip():
            raise FormatError(f"line {lineno}: unexpected trailing content")
    cache = CohesionCache(n=n, V=V, tau_ref=tau_ref, D=D, labels=labels)
    dissim.validate_dissimilarity(cache.d_square())
    return cache
