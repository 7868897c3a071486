"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Dataset seeds used here are disjoint from the seeds used to tune the default
fitness weights (1000 and up, plus 2024).
"""

import json
import time

import numpy as np
import pytest

import oracles
from swarmcluster import cli
from swarmcluster.autofa import AutoKParams, auto_cluster, find_clusters, snap_to_data
from swarmcluster.baseline import elbow_point, kmeans, lloyd, wcss_curve
from swarmcluster.datamodel import Dataset, Firefly, RngStream, assign, nearest_centroid
from swarmcluster.fa_core import FaParams, decay_alpha, run_fixed_k, wcss
from swarmcluster.fitness import compactness, resolve_bounds, separation
from swarmcluster.geometry import convex_hull
from swarmcluster.report import dumps, strip_timings
from swarmcluster.synth import gaussian_blobs, mixed_field, write_points
from swarmcluster.tsp import acs_tour, brute_force_tour, nn_tour

pytestmark = pytest.mark.slow


def report(capsys, name: str, ok: bool, detail: str, seconds: float) -> None:
    with capsys.disabled():
        print(f"\nACCEPTANCE {'PASS' if ok else 'FAIL'} {name}: {detail} [{seconds:.1f}s]")


def test_oracle_equivalence(capsys):
    t0 = time.perf_counter()
    failures = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 101))
        k = int(rng.integers(1, min(6, n) + 1))
        pts = rng.normal(scale=rng.uniform(0.1, 50), size=(n, 2))
        cents = pts[rng.choice(n, k, replace=False)] + rng.normal(scale=0.1, size=(k, 2))
        d, f = Dataset(pts), Firefly(cents)
        part = assign(d, f)
        P, C = pts.tolist(), cents.tolist()
        checks = {
            "compactness": abs(compactness(part, d) - oracles.compactness(P, C)) <= 1e-9,
            "separation": k < 2 or abs(separation(f) - oracles.separation(C)) <= 1e-9,
            "wcss": abs(wcss(d, f) - oracles.wcss(P, C)) <= 1e-9,
            "assignment": part.assignment.tolist() == oracles.labels(P, C)
            and all(nearest_centroid(p, f) == oracles.nearest(p, C) for p in P[:10]),
        }
        failures += [(seed, name) for name, ok in checks.items() if not ok]
    dt = time.perf_counter() - t0
    ok = not failures and dt < 5
    report(capsys, "oracle equivalence", ok, f"{100 - len({s for s, _ in failures})}/100 instances", dt)
    assert not failures
    assert dt < 5


def test_tsp_correctness(capsys):
    t0 = time.perf_counter()
    hits = nn_ok = 0
    for seed in range(100):
        rng = np.random.default_rng(5000 + seed)
        pts = rng.uniform(size=(int(rng.integers(6, 9)), 2))
        opt = brute_force_tour(pts).length
        hits += acs_tour(pts, rng=RngStream(seed)).length <= opt + 1e-9
        nn_ok += nn_tour(pts).length >= opt - 1e-12
    square = [[0, 0], [1, 0], [1, 1], [0, 1]]
    exact = acs_tour(square, rng=RngStream(0)).length == 4.0 and nn_tour(square).length == 4.0
    dt = time.perf_counter() - t0
    ok = hits >= 95 and nn_ok == 100 and exact and dt < 30
    report(capsys, "TSP correctness", ok,
           f"acs optimal {hits}/100, nn >= optimum {nn_ok}/100, unit square exact {exact}", dt)
    assert hits >= 95 and nn_ok == 100 and exact
    assert dt < 30


def test_auto_k_recovery(capsys):
    t0 = time.perf_counter()
    ks, times = [], []
    for seed in range(6):
        pts, _ = gaussian_blobs(4, 50, 0.5, 30.0, RngStream(seed))
        s0 = time.perf_counter()
        ks.append(auto_cluster(Dataset(pts), AutoKParams(), seed=seed).best.k)
        times.append(time.perf_counter() - s0)
    hits = ks.count(4)
    ok = hits >= 5 and max(times) < 60
    report(capsys, "auto-K recovery", ok,
           f"k=4 in {hits}/6 seeds (k={ks}), slowest seed {max(times):.1f}s", time.perf_counter() - t0)
    assert hits >= 5
    assert max(times) < 60


def test_route_comparison(capsys, tmp_path):
    t0 = time.perf_counter()
    rows = []
    for seed in range(10):
        pts, _ = mixed_field(RngStream(seed))
        path = tmp_path / f"mixed{seed}.txt"
        write_points(path, pts)
        rep = cli.run(["compare", "--data", str(path), "--seed", str(seed), "--routes", "acs",
                       "--out", str(tmp_path / f"c{seed}.json")])
        c = rep["compare"]
        rows.append((c["k"], c["total_firefly"], c["total_kmeans"]))
    wins = sum(fa <= 1.05 * km for _, fa, km in rows)
    ratios = [round(fa / km, 3) for _, fa, km in rows]
    report(capsys, "FA vs K-Means route totals", wins >= 8,
           f"FA <= 1.05 x K-Means in {wins}/10 seeds (ratios {ratios})", time.perf_counter() - t0)
    assert wins >= 8


def test_fixed_k_parity(capsys):
    t0 = time.perf_counter()
    pts, _ = gaussian_blobs(4, 50, 0.5, 30.0, RngStream(0))
    d = Dataset(pts)
    fa = run_fixed_k(d, 4, rng=RngStream(0)).wcss
    km = kmeans(d, 4, restarts=10, rng=RngStream(0)).wcss
    dt = time.perf_counter() - t0
    ratio = fa / km
    report(capsys, "fixed-K parity", ratio <= 1.10 and dt < 30,
           f"FA WCSS / K-Means WCSS = {ratio:.3f}", dt)
    assert ratio <= 1.10
    assert dt < 30


def _invariants(seed: int, tmp_path) -> list[str]:
    """Check every invariant once on data derived from ``seed``; return the names that fail."""
    rng = np.random.default_rng(seed)
    bad = []
    pts = rng.uniform(0, rng.uniform(1, 100), size=(int(rng.integers(12, 30)), 2))
    d = Dataset(pts)
    rows = set(map(tuple, pts.tolist()))
    k_min = int(rng.integers(2, 5))
    k_max = int(rng.integers(k_min, 8))
    fa = FaParams(n_fireflies=4, alpha0=0.5, max_gens=5)
    p = AutoKParams(k_min=k_min, k_max=k_max, num_runs=1, fa=fa)

    seen = []
    confined = [True]

    def observe(gen, pop, best):
        seen.append(best)
        confined[0] &= all(k_min <= f.k <= k_max for f in pop)

    b = resolve_bounds(d, "theory")
    res = find_clusters(d, p, bounds=b, rng=RngStream(seed), observer=observe)
    fixed = run_fixed_k(d, k_min, fa, bounds=b, rng=RngStream(seed)).history
    for h in (seen, res.history, fixed):
        if any(b > a for a, b in zip(h, h[1:])):
            bad.append("best-so-far monotonicity")
    if not confined[0] or not k_min <= res.k <= k_max:
        bad.append("k-range confinement")

    f = Firefly(rng.uniform(pts.min(0) - 1, pts.max(0) + 1, size=(k_max, 2)))
    snapped = snap_to_data(f, d, p, RngStream(seed))
    if not (set(map(tuple, snapped.centroids.tolist())) <= rows and snapped.is_distinct()):
        bad.append("snap membership")

    a0, delta, t = rng.uniform(0, 2), rng.uniform(0, 1), int(rng.integers(0, 300))
    a = a0
    for _ in range(t):
        a = decay_alpha(a, delta)
    if not np.isclose(a, a0 * delta**t, rtol=1e-9, atol=1e-300):
        bad.append("alpha decay")

    hull = convex_hull(pts)
    if not (all(hull.contains(q) for q in pts)
            and set(map(tuple, hull.vertices.tolist())) == oracles.hull_vertex_set(pts.tolist())):
        bad.append("hull containment")

    k = int(rng.integers(1, 7))
    trace = lloyd(d, pts[rng.choice(len(pts), k, replace=False)])[3]
    if any(b > a + 1e-9 for a, b in zip(trace, trace[1:])):
        bad.append("Lloyd monotonicity")

    path = tmp_path / f"inv{seed}.txt"
    write_points(path, pts)
    if seed % 2:
        mode = ["cluster", "auto", "--k-min", str(k_min), "--k-max", str(k_max), "--runs", "1"]
    else:
        mode = ["cluster", "fixed", "--k", str(k_min)]
    argv = [*mode, "--data", str(path), "--seed", str(seed), "--bounds", "theory",
            "--fireflies", "3", "--iters", "3", "--routes", "nn"]
    texts = []
    for i in range(2):
        out = tmp_path / f"inv{seed}_{i}.json"
        cli.run([*argv, "--out", str(out)])
        texts.append(dumps(strip_timings(json.loads(out.read_text()))))
    if texts[0] != texts[1]:
        bad.append("report determinism")
    return bad


def test_invariant_suite(capsys, tmp_path):
    t0 = time.perf_counter()
    failures = {}
    for seed in range(200):
        for name in _invariants(seed, tmp_path):
            failures.setdefault(name, []).append(seed)
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    detail = "all invariants hold on 200 seeds" if not failures else f"failures {failures}"
    report(capsys, "invariant suite", ok, detail, dt)
    assert not failures
    assert dt < 60


def test_elbow_detection(capsys):
    t0 = time.perf_counter()
    found = {}
    for n_blobs in (3, 4, 5):
        pts, _ = gaussian_blobs(n_blobs, 40, 0.5, 30.0, RngStream(n_blobs))
        curve = wcss_curve(Dataset(pts), 2, 10, "kmeans", RngStream(0), restarts=10)
        found[n_blobs] = elbow_point(curve)
    hits = sum(k == v for k, v in found.items())
    report(capsys, "elbow detection", hits == 3, f"{hits}/3 blob counts recovered ({found})",
           time.perf_counter() - t0)
    assert hits == 3
