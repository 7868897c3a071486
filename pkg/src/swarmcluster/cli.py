"""Command-line front end.

Subcommands: ``gen``, ``cluster fixed``, ``cluster auto``, ``kmeans``,
``elbow``, ``route`` and ``compare``. Every command except ``gen`` writes a
JSON report (to ``--out`` or stdout) and optionally an SVG plot.

Exit codes: 0 on success, 1 for unreadable or invalid data, 2 for bad flags.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from swarmcluster import report as rpt
from swarmcluster.autofa import AutoKParams, auto_cluster
from swarmcluster.baseline import elbow_point, kmeans, wcss_curve
from swarmcluster.datamodel import Dataset, DatasetError, Firefly, Partition, RngStream, assign, load_dataset
from swarmcluster.fa_core import FaParams, run_fixed_k
from swarmcluster.fitness import (
    SEPARATION_TERMS,
    FitnessWeights,
    NormalizationBounds,
    evaluate_partition,
    resolve_bounds,
)
from swarmcluster.synth import corridor_field, gaussian_blobs, mixed_field, uniform_field, write_points
from swarmcluster.tsp import AcsParams, cluster_route_total

log = logging.getLogger("swarmcluster")

THREADS_ENV = "SWARM_CLUSTER_THREADS"

# stream keys under the master seed, one per pipeline stage
_KMEANS = 10
_ROUTES = 11
_FIXED = 12
_CURVE = 13


class FlagError(Exception):
    """Invalid flag combination or value detected after argparse."""


def max_workers() -> int:
    cap = os.environ.get(THREADS_ENV)
    cpus = os.cpu_count() or 1
    if cap is None:
        return cpus
    try:
        n = int(cap)
    except ValueError:
        raise FlagError(f"{THREADS_ENV} must be a positive integer, got {cap!r}")
    if n < 1:
        raise FlagError(f"{THREADS_ENV} must be a positive integer, got {cap!r}")
    return min(n, cpus)


# ---------------------------------------------------------------- parsing


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _weights(text: str) -> FitnessWeights:
    try:
        return FitnessWeights.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _bounds(text: str) -> str:
    if text in ("auto", "theory"):
        return text
    try:
        NormalizationBounds.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    return text


def _common(data_required: bool = True) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--data", required=data_required, metavar="PATH", help="point file, one point per line")
    p.add_argument("--seed", type=_u64, default=0, help="master seed (default 0)")
    p.add_argument("--out", metavar="PATH", help="JSON report path (default stdout)")
    p.add_argument("--svg", metavar="PATH", help="also write an SVG plot")
    p.add_argument("--weights", type=_weights, default=FitnessWeights(), metavar="WC,WS,WT")
    p.add_argument("--bounds", type=_bounds, default="auto", metavar="auto|theory|C,S,T",
                   help="fitness normalisation bounds (default auto)")
    p.add_argument("--separation-term", choices=SEPARATION_TERMS, default="intent")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _fa_flags(p: argparse.ArgumentParser, defaults: FaParams) -> None:
    g = p.add_argument_group("firefly parameters")
    g.add_argument("--fireflies", type=int, default=defaults.n_fireflies)
    g.add_argument("--iters", type=int, default=defaults.max_gens)
    g.add_argument("--alpha", type=float, default=defaults.alpha0)
    g.add_argument("--beta0", type=float, default=defaults.beta0)
    g.add_argument("--gamma", type=float, default=defaults.gamma)
    g.add_argument("--delta", type=float, default=defaults.delta)


def _auto_flags(p: argparse.ArgumentParser) -> None:
    d = AutoKParams()
    g = p.add_argument_group("automatic-K parameters")
    g.add_argument("--k-min", type=int, default=d.k_min)
    g.add_argument("--k-max", type=int, default=d.k_max)
    g.add_argument("--runs", type=int, default=d.num_runs)
    g.add_argument("--init-prob", type=float, default=d.initial_prob)
    g.add_argument("--final-prob", type=float, default=d.final_prob)
    _fa_flags(p, d.fa)


def _route_flags(p: argparse.ArgumentParser, default: str) -> None:
    d = AcsParams()
    g = p.add_argument_group("routing")
    g.add_argument("--routes", "--method", dest="routes", choices=("none", "nn", "acs"), default=default)
    g.add_argument("--ants", type=int, default=d.n_ants)
    g.add_argument("--acs-iters", type=int, default=d.n_iters)
    g.add_argument("--acs-beta", type=float, default=d.beta)
    g.add_argument("--rho", type=float, default=d.rho)
    g.add_argument("--phi", type=float, default=d.phi)
    g.add_argument("--q0", type=float, default=d.q0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmcluster", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    g = sub.add_parser("gen", help="write a synthetic point file", parents=[_common(data_required=False)])
    g.add_argument("--kind", choices=("blobs", "uniform", "corridors", "mixed"), default="blobs")
    g.add_argument("--blobs", type=int, default=4)
    g.add_argument("--per-blob", type=int, default=50)
    g.add_argument("--sigma", type=float, default=0.5)
    g.add_argument("--box", type=float, default=30.0)
    g.add_argument("--min-sep", type=float, help="minimum blob centre spacing (default 20 sigma)")
    g.add_argument("--n", type=int, default=1250, help="point count for the uniform field")
    g.add_argument("--corridors", type=int, default=2)
    g.add_argument("--per-corridor", type=int, default=50)

    c = sub.add_parser("cluster", help="firefly clustering")
    csub = c.add_subparsers(dest="mode", required=True)
    fixed = csub.add_parser("fixed", help="fixed number of clusters", parents=[common])
    fixed.add_argument("--k", type=int, required=True)
    _fa_flags(fixed, FaParams())
    _route_flags(fixed, "none")
    auto = csub.add_parser("auto", help="choose the number of clusters", parents=[common])
    _auto_flags(auto)
    _route_flags(auto, "none")

    km = sub.add_parser("kmeans", help="Lloyd K-Means baseline", parents=[common])
    km.add_argument("--k", type=int, required=True)
    km.add_argument("--restarts", type=int, default=10)
    km.add_argument("--max-iters", type=int, default=300)
    _route_flags(km, "none")

    el = sub.add_parser("elbow", help="WCSS-vs-K curve and its elbow", parents=[common])
    el.add_argument("--algo", choices=("kmeans", "fa"), default="kmeans")
    el.add_argument("--k-min", type=int, default=2)
    el.add_argument("--k-max", type=int, default=10)
    el.add_argument("--restarts", type=int, default=10)
    el.add_argument("--max-iters", type=int, default=300)
    _fa_flags(el, FaParams())

    ro = sub.add_parser("route", help="closed tours over labelled clusters", parents=[common])
    ro.add_argument("--labels", metavar="PATH",
                    help="one integer label per point (default: a single cluster)")
    _route_flags(ro, "acs")

    cm = sub.add_parser("compare", help="route distances of firefly vs K-Means clusters",
                        parents=[common])
    _auto_flags(cm)
    cm.add_argument("--restarts", type=int, default=10)
    _route_flags(cm, "acs")
    return parser


# ------------------------------------------------------------- helpers


def _fa_params(a) -> FaParams:
    return FaParams(a.fireflies, a.alpha, a.beta0, a.gamma, a.delta, a.iters)


def _auto_params(a) -> AutoKParams:
    return AutoKParams(a.k_min, a.k_max, a.init_prob, a.final_prob, a.runs, _fa_params(a))


def _acs_params(a) -> AcsParams:
    return AcsParams(a.ants, a.acs_iters, a.acs_beta, a.rho, a.phi, a.q0)


def _invocation(a) -> dict:
    """JSON-native copy of every parsed flag (minus output paths)."""
    out = {}
    for key, value in sorted(vars(a).items()):
        if key in ("out", "svg", "verbose"):
            continue
        if isinstance(value, FitnessWeights):
            value = [value.w_comp, value.w_sep, value.w_tsp]
        out[key] = value
    return out


@contextmanager
def _timed(report: dict, key: str):
    t0 = time.perf_counter()
    yield
    report["timings"][key] = round(time.perf_counter() - t0, 6)


def _routes(a, part: Partition, data: Dataset, seed: int) -> dict | None:
    if a.routes == "none":
        return None
    params = _acs_params(a) if a.routes == "acs" else None
    summary = cluster_route_total(part, data, a.routes, params, RngStream(seed, _ROUTES))
    return rpt.routes_dict(summary, a.routes)


def _solution(part: Partition, data: Dataset, a, bounds: NormalizationBounds) -> dict:
    bd = evaluate_partition(part, data, a.weights, bounds, a.separation_term)
    return {
        "k": part.k,
        "centroids": part.centroids.centroids.tolist(),
        "fitness": rpt.breakdown_dict(bd),
        "wcss": _partition_wcss(part, data),
        "cluster_sizes": [int(s) for s in part.sizes],
    }


def _partition_wcss(part: Partition, data: Dataset) -> float:
    diff = data.points - part.centroids.centroids[part.assignment]
    return float((diff**2).sum())


def _attach_partition(report: dict, part: Partition, data: Dataset, a, seed: int) -> None:
    report["assignment"] = [int(v) for v in part.assignment]
    report["hulls"] = rpt.hulls_for(part, data)
    with _timed(report, "routes"):
        report["routes"] = _routes(a, part, data, seed)


def _bounds_dict(b: NormalizationBounds) -> dict:
    return {
        "max_compactness": b.max_compactness,
        "max_separation": b.max_separation,
        "max_tsp_penalty": b.max_tsp_penalty,
    }


def _resolve(a, data: Dataset) -> NormalizationBounds:
    spec = a.bounds
    if spec not in ("auto", "theory"):
        spec = NormalizationBounds.parse(spec)
    return resolve_bounds(data, spec)


# ------------------------------------------------------------ commands


def cmd_gen(a) -> dict | None:
    rng = RngStream(a.seed)
    if a.sigma < 0 or not np.isfinite(a.sigma):
        raise FlagError("--sigma must be >= 0")
    if a.box <= 0 or not np.isfinite(a.box):
        raise FlagError("--box must be positive")
    if a.kind == "blobs":
        if a.blobs < 1 or a.per_blob < 1:
            raise FlagError("--blobs and --per-blob must be positive")
        try:
            pts, labels = gaussian_blobs(a.blobs, a.per_blob, a.sigma, a.box, rng, a.min_sep)
        except ValueError as e:
            raise FlagError(str(e))
    elif a.kind == "uniform":
        if a.n < 1:
            raise FlagError("--n must be positive")
        pts, labels = uniform_field(a.n, a.box, rng)
    elif a.kind == "corridors":
        pts, labels = corridor_field(a.corridors, a.per_corridor, 14.0, 1.0, 5.0, rng)
    else:
        pts, labels = mixed_field(rng, a.sigma)
    target = a.out or a.data
    if not target:
        raise FlagError("gen needs --out PATH for the point file")
    write_points(target, pts, labels)
    log.info("wrote %d points to %s", len(pts), target)
    return None


def cmd_cluster(a, data: Dataset, report: dict) -> Partition:
    bounds = _resolve(a, data)
    report["bounds"] = _bounds_dict(bounds)
    if a.mode == "fixed":
        if not 1 <= a.k <= data.n_points:
            raise FlagError(f"--k must lie in [1, {data.n_points}]")
        with _timed(report, "cluster"):
            res = run_fixed_k(data, a.k, _fa_params(a), a.weights, bounds,
                              RngStream(a.seed, _FIXED), a.separation_term)
        report["runs"] = [{
            "run": 0, "k": res.k, "fitness": rpt.breakdown_dict(res.breakdown),
            "wcss": res.wcss, "centroids": res.best.centroids.tolist(), "history": res.history,
        }]
        best = res.best
    else:
        p = _auto_params(a)
        with _timed(report, "cluster"):
            res = auto_cluster(data, p, a.weights, bounds, a.seed, a.separation_term,
                               workers=max_workers())
        report["runs"] = [
            {"run": i, "k": r.k, "fitness": rpt.breakdown_dict(r.breakdown), "wcss": r.wcss,
             "centroids": r.best.centroids.tolist(), "history": r.history}
            for i, r in enumerate(res.runs)
        ]
        report["selected_run"] = res.best_index
        best = res.best.best
    part = assign(data, best)
    report["selected"] = _solution(part, data, a, bounds)
    _attach_partition(report, part, data, a, a.seed)
    return part


def cmd_kmeans(a, data: Dataset, report: dict) -> Partition:
    if not 1 <= a.k <= data.n_points:
        raise FlagError(f"--k must lie in [1, {data.n_points}]")
    bounds = _resolve(a, data)
    report["bounds"] = _bounds_dict(bounds)
    with _timed(report, "kmeans"):
        res = kmeans(data, a.k, a.restarts, a.max_iters, RngStream(a.seed, _KMEANS))
    report["kmeans"] = {
        "restart_index": res.restart_index, "iterations_used": res.iterations_used,
        "trace": res.trace,
    }
    report["selected"] = _solution(res.assignment, data, a, bounds)
    _attach_partition(report, res.assignment, data, a, a.seed)
    return res.assignment


def cmd_elbow(a, data: Dataset, report: dict) -> None:
    if not 1 <= a.k_min <= a.k_max <= data.n_points:
        raise FlagError(f"need 1 <= --k-min <= --k-max <= {data.n_points}")
    if a.k_max - a.k_min < 2:
        raise FlagError("the elbow needs at least 3 values of K")
    bounds = _resolve(a, data)
    with _timed(report, "curve"):
        curve = wcss_curve(data, a.k_min, a.k_max, a.algo, RngStream(a.seed, _CURVE), a.restarts,
                           a.max_iters, _fa_params(a), a.weights, bounds, a.separation_term)
    report["curve"] = [{"k": k, "wcss": w} for k, w in curve]
    report["elbow"] = elbow_point(curve)


def _read_labels(path: str, n: int) -> np.ndarray:
    try:
        lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    except OSError as e:
        raise DatasetError(f"cannot read labels: {e}")
    vals = []
    for i, ln in enumerate(lines, 1):
        if not ln or ln.startswith("#"):
            continue
        try:
            vals.append(int(ln))
        except ValueError:
            raise DatasetError(f"label is not an integer: {ln!r}", line=i)
    if len(vals) != n:
        raise DatasetError(f"{len(vals)} labels for {n} points")
    if min(vals) < 0:
        raise DatasetError("labels must be non-negative")
    return np.asarray(vals, dtype=np.intp)


def _partition_from_labels(data: Dataset, labels: np.ndarray) -> Partition:
    uniq = np.unique(labels)
    remap = np.searchsorted(uniq, labels)
    clusters = tuple(np.flatnonzero(remap == c) for c in range(len(uniq)))
    cents = np.array([data.points[m].mean(axis=0) for m in clusters])
    return Partition(remap, clusters, Firefly(cents))


def cmd_route(a, data: Dataset, report: dict) -> Partition:
    if a.routes == "none":
        raise FlagError("route needs --routes nn or acs")
    labels = _read_labels(a.labels, data.n_points) if a.labels else np.zeros(data.n_points, np.intp)
    part = _partition_from_labels(data, labels)
    _attach_partition(report, part, data, a, a.seed)
    return part


def cmd_compare(a, data: Dataset, report: dict) -> Partition:
    if a.routes == "none":
        raise FlagError("compare needs --routes nn or acs")
    bounds = _resolve(a, data)
    report["bounds"] = _bounds_dict(bounds)
    with _timed(report, "firefly"):
        fa = auto_cluster(data, _auto_params(a), a.weights, bounds, a.seed, a.separation_term,
                          workers=max_workers())
    fa_part = assign(data, fa.best.best)
    with _timed(report, "kmeans"):
        km = kmeans(data, fa_part.k, a.restarts, rng=RngStream(a.seed, _KMEANS))
    sides = {}
    for name, part in (("firefly", fa_part), ("kmeans", km.assignment)):
        with _timed(report, f"routes_{name}"):
            routes = _routes(a, part, data, a.seed)
        sides[name] = {**_solution(part, data, a, bounds), "routes": routes,
                       "assignment": [int(v) for v in part.assignment]}
    report["compare"] = {
        "k": fa_part.k,
        **sides,
        "table": [
            {"cluster": c,
             "firefly": sides["firefly"]["routes"]["per_cluster"][c]["length"],
             "kmeans": sides["kmeans"]["routes"]["per_cluster"][c]["length"]}
            for c in range(fa_part.k)
        ],
        "total_firefly": sides["firefly"]["routes"]["total"],
        "total_kmeans": sides["kmeans"]["routes"]["total"],
    }
    report["hulls"] = rpt.hulls_for(fa_part, data)
    return fa_part


# ----------------------------------------------------------------- main


def run(argv: list[str] | None = None) -> dict | None:
    """Parse ``argv``, execute, emit outputs and return the report.

    Raises :class:`FlagError`, :class:`DatasetError` or ``SystemExit``.
    """
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if a.command == "gen":
        return cmd_gen(a)

    command = a.command + (f" {a.mode}" if a.command == "cluster" else "")
    report = rpt.new_report(command, _invocation(a), None, None)
    with _timed(report, "load"):
        data = load_dataset(a.data)
    report["dataset"] = {"path": a.data, **data.summary()}

    try:
        handler = {"cluster": cmd_cluster, "kmeans": cmd_kmeans, "elbow": cmd_elbow,
                   "route": cmd_route, "compare": cmd_compare}[a.command]
        part = handler(a, data, report)
    except ValueError as e:
        if isinstance(e, DatasetError):
            raise
        raise FlagError(str(e)) from e

    text = rpt.dumps(report)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if a.svg:
        if part is None:
            Path(a.svg).write_text(rpt.render_svg(data), encoding="utf-8")
        else:
            routes = report.get("routes") or (report.get("compare", {}).get("firefly", {}).get("routes"))
            svg = rpt.render_svg(data, part.assignment, part.centroids.centroids,
                                 report.get("hulls"), routes)
            Path(a.svg).write_text(svg, encoding="utf-8")
    return report


def main(argv: list[str] | None = None) -> int:
    try:
        run(argv)
    except SystemExit as e:  # argparse: 2 on bad flags, 0 on --help
        return int(e.code or 0)
    except FlagError as e:
        print(f"swarmcluster: error: {e}", file=sys.stderr)
        return 2
    except DatasetError as e:
        print(f"swarmcluster: data error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
