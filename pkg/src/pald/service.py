"""FastAPI service exposing cache build, online queries, clustering and
classification over in-memory cohesion caches."""

from __future__ import annotations

import uuid

import numpy as np
from fastapi import FastAPI, HTTPException

from . import cache as cachemod
from . import core, dissim, tasks
from .errors import PaldError
from .schemas import (
    AnomalyResponse,
    BuildRequest,
    CacheSummary,
    ClassifyRequest,
    ClassifyResponse,
    ClustersResponse,
    QueryRequest,
    QueryResponse,
)

app = FastAPI(title="pald", description="Online partitioned local depth queries")

_caches: dict[str, cachemod.CohesionCache] = {}


def _get_cache(cache_id: str) -> cachemod.CohesionCache:
    if cache_id not in _caches:
        raise HTTPException(status_code=404, detail=f"no cache with id {cache_id}")
    return _caches[cache_id]


def _test_input(req: QueryRequest):
    if (req.point is None) == (req.distances is None):
        raise HTTPException(status_code=422, detail="provide exactly one of point/distances")
    return req.point if req.point is not None else req.distances


@app.exception_handler(PaldError)
async def pald_error_handler(request, exc):
    from fastapi.responses import JSONResponse

    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.post("/caches", response_model=CacheSummary)
def build(req: BuildRequest) -> CacheSummary:
    if (req.points is None) == (req.distances is None):
        raise HTTPException(status_code=422, detail="provide exactly one of points/distances")
    if req.points is not None:
        pts = np.asarray(req.points, dtype=float)
        D = dissim.pairwise_dissimilarity(pts, metric=req.metric)
        built = cachemod.build_cache(D, labels=req.labels, points=pts,
                                     metric=req.metric, tie_tol=req.tolerance)
    else:
        D = dissim.pairwise_dissimilarity(req.distances, metric="precomputed")
        built = cachemod.build_cache(D, labels=req.labels, tie_tol=req.tolerance)
    cache_id = uuid.uuid4().hex[:12]
    _caches[cache_id] = built
    return _summary(cache_id, built)


def _summary(cache_id: str, c: cachemod.CohesionCache) -> CacheSummary:
    return CacheSummary(cache_id=cache_id, n=c.n, tau=c.tau_ref,
                        has_labels=c.labels is not None, metric=c.metric)


@app.get("/caches/{cache_id}", response_model=CacheSummary)
def summary(cache_id: str) -> CacheSummary:
    return _summary(cache_id, _get_cache(cache_id))


@app.delete("/caches/{cache_id}")
def drop(cache_id: str) -> dict:
    _get_cache(cache_id)
    del _caches[cache_id]
    return {"deleted": cache_id}


@app.post("/caches/{cache_id}/query", response_model=QueryResponse)
def query(cache_id: str, req: QueryRequest) -> QueryResponse:
    out = cachemod.query(_get_cache(cache_id), _test_input(req))
    return QueryResponse(
        cohesion_to=out.cohesion_to.tolist(),
        cohesion_from=out.cohesion_from.tolist(),
        self_cohesion=out.self_cohesion,
        epsilon=out.epsilon,
        tau_updated=out.tau_updated,
        strong_neighbors=sorted(out.strong_neighbors),
        is_outlier=out.is_outlier,
    )


@app.post("/caches/{cache_id}/classify", response_model=ClassifyResponse)
def classify(cache_id: str, req: ClassifyRequest) -> ClassifyResponse:
    scores = tasks.classify(_get_cache(cache_id), _test_input(req), method=req.method)
    return ClassifyResponse(
        per_class={str(k): v for k, v in scores.per_class.items()},
        method=scores.method,
        predicted=str(scores.predicted),
        tie=scores.tie,
    )


@app.post("/caches/{cache_id}/anomaly", response_model=AnomalyResponse)
def anomaly(cache_id: str, req: QueryRequest) -> AnomalyResponse:
    score = tasks.anomaly_score(_get_cache(cache_id), _test_input(req))
    return AnomalyResponse(raw=score.raw, rank_score=score.rank_score)


@app.get("/caches/{cache_id}/clusters", response_model=ClustersResponse)
def clusters(cache_id: str) -> ClustersResponse:
    c = _get_cache(cache_id)
    C = cachemod.lazy_network(c)
    network = core.cohesion_network(C)
    return ClustersResponse(threshold=network.threshold,
                            clusters=core.strong_components(network))
