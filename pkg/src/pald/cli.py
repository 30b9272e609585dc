"""Command-line front end; thin wrapper over the library plus a `serve`
command for the HTTP service.

Subcommands: build, query, cluster, anomaly, classify, bench, boundary,
serve.  Errors print a one-line "error: ..." message to stderr and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import cache as cachemod
from . import core, dissim, tasks
from .errors import PaldError


def _default_threads() -> int:
    return min(os.cpu_count() or 1, 4)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pald", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cache_arg=True):
        sp.add_argument("--input", help="points CSV (rows = points, optional label column)")
        sp.add_argument("--distances", help="square precomputed-dissimilarity CSV")
        sp.add_argument("--metric", default="euclidean", choices=["euclidean", "manhattan"])
        sp.add_argument("--tolerance", type=float, default=0.0,
                        help="optional tie-detection tolerance (default exact equality)")
        sp.add_argument("--threads", type=int, default=_default_threads())
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", default="csv", choices=["csv", "json"])
        if cache_arg:
            sp.add_argument("--cache", help="cache file path")

    sp = sub.add_parser("build", help="build a cohesion cache and save it")
    common(sp)

    sp = sub.add_parser("query", help="query a cache with one test point")
    common(sp)
    sp.add_argument("--point", required=True,
                    help="comma-separated coordinates, or a length-n dissimilarity vector")

    sp = sub.add_parser("cluster", help="strong-component clustering of the reference data")
    common(sp)
    sp.add_argument("--weights",
                    help="comma-separated fusion weights, aligned with a comma-separated "
                         "list of --distances files (generalized cohesion)")

    sp = sub.add_parser("anomaly", help="score test points against a normal reference set")
    common(sp)
    sp.add_argument("--test", required=True, help="test CSV with an 'anomaly' 0/1 column")
    sp.add_argument("--score", default="pald", choices=["pald", "knn"])
    sp.add_argument("--k", type=int, default=5)

    sp = sub.add_parser("classify", help="classify test points or cross-validate")
    common(sp)
    sp.add_argument("--test", help="test CSV; omit to cross-validate --input")
    sp.add_argument("--method", default="count_to", choices=list(tasks.METHODS) + ["knn"])
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("bench", help="time batch vs online on synthetic data")
    common(sp, cache_arg=False)
    sp.add_argument("--sizes", default="7,15,99", help="comma-separated reference sizes")
    sp.add_argument("--reps", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("boundary", help="decision-boundary grid over 2-d reference data")
    common(sp)
    sp.add_argument("--method", default="count_to", choices=list(tasks.METHODS))
    sp.add_argument("--grid", default="50", help="cells per axis: N or NX,NY")
    sp.add_argument("--bounds", help="xmin,xmax,ymin,ymax (default data bbox + 20%% margin)")

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    return p


def _load_reference(args):
    """Returns (D, labels, points) from --input or --distances."""
    if args.input:
        points, labels, _ = dissim.load_points_csv(args.input)
        D = dissim.pairwise_dissimilarity(points, metric=args.metric)
        return D, labels, points
    if args.distances:
        return dissim.load_distances_csv(args.distances), None, None
    raise PaldError("one of --input or --distances is required")


def _load_cache(args):
    if args.cache and not (args.input or args.distances):
        return cachemod.load_cache(args.cache)
    D, labels, points = _load_reference(args)
    return cachemod.build_cache(D, labels=labels, points=points,
                                metric=args.metric, tie_tol=args.tolerance)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    D, labels, points = _load_reference(args)
    built = cachemod.build_cache(D, labels=labels, points=points,
                                 metric=args.metric, tie_tol=args.tolerance)
    path = args.cache or args.out
    if not path:
        raise PaldError("--cache (or --out) is required to save the cache")
    cachemod.save_cache(built, path)
    print(f"n={built.n} tau={built.tau_ref:.6f} cache={path}")
    return 0


def cmd_query(args) -> int:
    ref = _load_cache(args)
    point = [float(v) for v in args.point.split(",")]
    out = cachemod.query(ref, point)
    payload = {
        "cohesion_to": out.cohesion_to.tolist(),
        "cohesion_from": out.cohesion_from.tolist(),
        "self_cohesion": out.self_cohesion,
        "epsilon": out.epsilon,
        "tau_updated": out.tau_updated,
        "strong_neighbors": sorted(out.strong_neighbors),
        "is_outlier": out.is_outlier,
    }
    if args.format == "json":
        _emit(args, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [f"self_cohesion,{out.self_cohesion:.17g}",
                 f"epsilon,{out.epsilon:.17g}",
                 f"tau_updated,{out.tau_updated:.17g}",
                 "strong_neighbors," + " ".join(str(i) for i in sorted(out.strong_neighbors)),
                 f"is_outlier,{out.is_outlier}"]
        lines += [f"cohesion_to[{i}],{v:.17g}" for i, v in enumerate(out.cohesion_to)]
        lines += [f"cohesion_from[{i}],{v:.17g}" for i, v in enumerate(out.cohesion_from)]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_cluster(args) -> int:
    if args.distances and "," in args.distances:
        from . import generalized as gp

        paths = args.distances.split(",")
        if args.weights:
            weights = [float(w) for w in args.weights.split(",")]
        else:
            weights = [1.0 / len(paths)] * len(paths)
        Ds = [dissim.load_distances_csv(p) for p in paths]
        R, Q = gp.fuse_dissimilarities(Ds, weights, tie_tol=args.tolerance)
        C = gp.generalized_cohesion(R, Q)
        tau = gp.generalized_threshold(gp.generalized_sizes(R))
        network = core.CohesionNetwork(weights=np.minimum(C, C.T), threshold=tau)
        n = C.shape[0]
    else:
        ref = _load_cache(args)
        network = core.cohesion_network(cachemod.lazy_network(ref))
        n = ref.n
    clusters = core.strong_components(network)
    if args.format == "json":
        _emit(args, json.dumps({"threshold": network.threshold, "clusters": clusters}) + "\n")
    else:
        lines = [f"threshold,{network.threshold:.17g}"]
        lines += [f"cluster{i}," + " ".join(map(str, c)) for i, c in enumerate(clusters)]
        _emit(args, "\n".join(lines) + "\n")
    print(f"n={n} clusters={len(clusters)} tau={network.threshold:.6f}", file=sys.stderr)
    return 0


def _split_anomaly(path):
    points, labels, _ = dissim.load_points_csv(path)
    if labels is None:
        return points, None
    flags = np.array([int(float(v)) for v in labels])
    return points, flags


def cmd_anomaly(args) -> int:
    train_pts, train_flags = _split_anomaly(args.input) if args.input else (None, None)
    if train_pts is None:
        raise PaldError("--input (training points) is required")
    if train_flags is not None:
        train_pts = train_pts[train_flags == 0]  # keep normals only
    test_pts, test_flags = _split_anomaly(args.test)
    if test_flags is None:
        raise PaldError("test CSV needs an 'anomaly' column with 0/1 values")
    report = tasks.evaluate_anomaly(train_pts, test_pts, test_flags, scorer=args.score,
                                    k=args.k, metric=args.metric, tie_tol=args.tolerance)
    if args.format == "json":
        _emit(args, json.dumps({"roc_auc": report.roc_auc, "pr_auc": report.pr_auc}) + "\n")
    else:
        _emit(args, f"metric,value\nroc_auc,{report.roc_auc:.17g}\npr_auc,{report.pr_auc:.17g}\n")
    print(f"scorer={args.score} roc_auc={report.roc_auc:.6f} pr_auc={report.pr_auc:.6f}",
          file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    points, labels, _ = dissim.load_points_csv(args.input)
    if labels is None:
        raise PaldError("training CSV needs a 'label' column")
    if args.test:
        test_pts, test_labels, _ = dissim.load_points_csv(args.test)
        D = dissim.pairwise_dissimilarity(points, metric=args.metric)
        ref = cachemod.build_cache(D, labels=labels, points=points,
                                   metric=args.metric, tie_tol=args.tolerance)
        rows = []
        correct = 0
        for i, t in enumerate(test_pts):
            if args.method == "knn":
                pred = tasks.knn_classify(points, labels, t, k=args.k, metric=args.metric)
            else:
                pred = tasks.classify(ref, t, method=args.method)
            rows.append((i, pred.predicted, pred.tie))
            if test_labels is not None and pred.predicted == test_labels[i]:
                correct += 1
        body = "index,predicted,tie\n" + "\n".join(f"{i},{p},{t}" for i, p, t in rows) + "\n"
        _emit(args, body)
        if test_labels is not None:
            print(f"accuracy={correct / len(rows):.6f}", file=sys.stderr)
    else:
        report = tasks.cross_validate_classify(points, labels, method=args.method,
                                               k_folds=args.folds, seed=args.seed,
                                               metric=args.metric, tie_tol=args.tolerance)
        if args.format == "json":
            _emit(args, json.dumps({"accuracy": report.accuracy,
                                    "per_fold": report.per_fold}) + "\n")
        else:
            body = "fold,accuracy\n"
            body += "\n".join(f"{i},{a:.17g}" for i, a in enumerate(report.per_fold))
            body += f"\noverall,{report.accuracy:.17g}\n"
            _emit(args, body)
        print(f"method={args.method} folds={args.folds} accuracy={report.accuracy:.6f}",
              file=sys.stderr)
    return 0


def run_bench(sizes, reps: int, seed: int = 0, threads: int = 1) -> list:
    """Batch on n+1 points vs cache build on n plus one query, plus the lazy
    network stage; returns one record per n with mean seconds."""
    records = []
    rng = np.random.default_rng(seed)
    for n in sizes:
        pts = rng.random((n + 1, 2))
        ref, t = pts[:-1], pts[-1]
        D_full = dissim.pairwise_dissimilarity(pts)
        D_ref = D_full[:-1, :-1]
        batch = build = qtime = lazy = 0.0
        for _ in range(reps):
            t0 = time.perf_counter()
            core.cohesion_matrix(D_full, threads=threads)
            batch += time.perf_counter() - t0
            t0 = time.perf_counter()
            built = cachemod.build_cache(D_ref, points=ref)
            build += time.perf_counter() - t0
            t0 = time.perf_counter()
            cachemod.query(built, t)
            qtime += time.perf_counter() - t0
            t0 = time.perf_counter()
            cachemod.lazy_network(built)
            lazy += time.perf_counter() - t0
        records.append({
            "n": n,
            "batch_s": batch / reps,
            "build_s": build / reps,
            "query_s": qtime / reps,
            "lazy_network_s": lazy / reps,
            "total_online_s": (build + lazy) / reps,
            "reps": reps,
        })
    return records


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    if any(s < 3 for s in sizes):
        raise PaldError("bench sizes must be at least 3")
    records = run_bench(sizes, args.reps, seed=args.seed, threads=args.threads)
    header = "n,batch_s,build_s,query_s,lazy_network_s,total_online_s,reps"
    lines = [header]
    for r in records:
        lines.append(",".join([str(r["n"]), f"{r['batch_s']:.17g}", f"{r['build_s']:.17g}",
                               f"{r['query_s']:.17g}", f"{r['lazy_network_s']:.17g}",
                               f"{r['total_online_s']:.17g}", str(r["reps"])]))
    _emit(args, "\n".join(lines) + "\n")
    for r in records:
        print(f"n={r['n']} batch={r['batch_s']:.6f}s online_query={r['query_s']:.6f}s",
              file=sys.stderr)
    return 0


def cmd_boundary(args) -> int:
    points, labels, _ = dissim.load_points_csv(args.input)
    if labels is None:
        raise PaldError("training CSV needs a 'label' column")
    D = dissim.pairwise_dissimilarity(points, metric=args.metric)
    ref = cachemod.build_cache(D, labels=labels, points=points,
                               metric=args.metric, tie_tol=args.tolerance)
    steps = tuple(int(v) for v in args.grid.split(","))
    steps = steps[0] if len(steps) == 1 else steps
    if args.bounds:
        bounds = tuple(float(v) for v in args.bounds.split(","))
    else:
        lo, hi = points.min(axis=0), points.max(axis=0)
        margin = 0.2 * (hi - lo)
        bounds = (lo[0] - margin[0], hi[0] + margin[0], lo[1] - margin[1], hi[1] + margin[1])
    records = tasks.decision_boundary_grid(ref, bounds, steps, method=args.method)
    lines = ["x,y,class"]
    for x, y, cls in records:
        lines.append(f"{x:.17g},{y:.17g},{'' if cls is None else cls}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("pald.service:app", host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "build": cmd_build,
    "query": cmd_query,
    "cluster": cmd_cluster,
    "anomaly": cmd_anomaly,
    "classify": cmd_classify,
    "bench": cmd_bench,
    "boundary": cmd_boundary,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except PaldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
