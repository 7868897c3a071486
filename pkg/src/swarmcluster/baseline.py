"""Lloyd K-Means with restarts, WCSS-vs-K curves and elbow detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from swarmcluster.datamodel import Dataset, Firefly, Partition, RngStream, assign, assign_labels
from swarmcluster.fa_core import FaParams, run_fixed_k
from swarmcluster.fitness import FitnessWeights, NormalizationBounds


@dataclass
class KmeansResult:
    centroids: Firefly
    assignment: Partition
    wcss: float
    iterations_used: int
    restart_index: int
    trace: list[float] = field(default_factory=list)  # WCSS after each assignment step


def _wcss(points: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    diff = points - centroids[labels]
    return float((diff**2).sum())


def lloyd(
    data: Dataset,
    init: np.ndarray,
    max_iters: int = 300,
) -> tuple[np.ndarray, np.ndarray, int, list[float]]:
    """Run Lloyd iterations from ``init`` centroids.

    Stops when the assignment no longer changes or after ``max_iters`` mean
    updates. An emptied cluster is reseeded on the point farthest from its
    current centroid.
    """
    pts = data.points
    k = len(init)
    cent = np.array(init, dtype=float, copy=True)
    labels = assign_labels(pts, cent)
    trace = [_wcss(pts, cent, labels)]
    it = 0
    while it < max_iters:
        it += 1
        new = np.empty_like(cent)
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c]:
                new[c] = pts[labels == c].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if len(empty):
            d2 = ((pts - cent[labels]) ** 2).sum(axis=1)
            taken: set[int] = set()
            for c in empty:
                for i in np.argsort(-d2, kind="stable"):
                    if int(i) not in taken:
                        taken.add(int(i))
                        new[c] = pts[i]
                        break
        new_labels = assign_labels(pts, new)
        cent = new
        trace.append(_wcss(pts, cent, new_labels))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return cent, labels, it, trace


def kmeans(
    data: Dataset,
    k: int,
    restarts: int = 10,
    max_iters: int = 300,
    rng: RngStream | None = None,
) -> KmeansResult:
    """Plain K-Means: each restart starts from ``k`` distinct random data points."""
    if not 1 <= k <= data.n_points:
        raise ValueError(f"k must lie in [1, {data.n_points}], got {k}")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    rng = rng or RngStream(0)
    best = None
    for r in range(restarts):
        stream = rng.derive(r)
        init = data.points[stream.choice(data.n_points, k, replace=False)]
        cent, labels, iters, trace = lloyd(data, init, max_iters)
        score = trace[-1]
        if best is None or score < best[0]:
            best = (score, cent, iters, r, trace)
    score, cent, iters, r, trace = best
    f = Firefly(cent)
    return KmeansResult(f, assign(data, f), score, iters, r, trace)


def wcss_curve(
    data: Dataset,
    k_lo: int,
    k_hi: int,
    algo: str = "kmeans",
    rng: RngStream | None = None,
    restarts: int = 10,
    max_iters: int = 300,
    fa_params: FaParams | None = None,
    weights: FitnessWeights | None = None,
    bounds: NormalizationBounds | str | None = None,
    separation_term: str = "intent",
) -> list[tuple[int, float]]:
    """Best WCSS per K. Values are reported as found, not forced monotone."""
    if not 1 <= k_lo <= k_hi <= data.n_points:
        raise ValueError(f"need 1 <= k_lo <= k_hi <= {data.n_points}")
    rng = rng or RngStream(0)
    curve = []
    for k in range(k_lo, k_hi + 1):
        stream = rng.derive(k)
        if algo == "kmeans":
            w = kmeans(data, k, restarts, max_iters, stream).wcss
        elif algo == "fa":
            w = run_fixed_k(data, k, fa_params, weights, bounds, stream, separation_term).wcss
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        curve.append((k, w))
    return curve


def chord_distances(curve: Sequence[tuple[float, float]]) -> np.ndarray:
    """Perpendicular distance of every curve point to the endpoint chord."""
    ks = np.array([c[0] for c in curve], dtype=float)
    ws = np.array([c[1] for c in curve], dtype=float)
    dk = ks[-1] - ks[0]
    dw = ws[-1] - ws[0]
    norm = math.hypot(dk, dw)
    return np.abs(dk * (ws[0] - ws) - (ks[0] - ks) * dw) / norm


def elbow_point(curve: Sequence[tuple[float, float]]) -> int:
    """K with the largest distance to the chord joining the curve's endpoints.

    Near-ties (relative 1e-9) resolve to the smaller K; an exactly straight
    curve therefore returns its smallest interior K.
    """
    if len(curve) < 3:
        raise ValueError("elbow detection needs at least 3 curve points")
    ks = [c[0] for c in curve]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("curve K values must be strictly increasing")
    d = chord_distances(curve)
    interior = d[1:-1]
    top = interior.max()
    scale = max(abs(c[1]) for c in curve) or 1.0
    pick = int(np.flatnonzero(interior >= top - 1e-9 * scale)[0]) + 1
    return int(ks[pick])
