"""Canonical firefly algorithm for clustering with a fixed number of centroids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from swarmcluster.datamodel import Dataset, Firefly, RngStream, assign_labels
from swarmcluster.fitness import (
    FitnessBreakdown,
    FitnessWeights,
    NormalizationBounds,
    resolve_bounds,
    evaluate,
)

# leading keys for derived random streams
INIT_STREAM = 0
MOVE_STREAM = 1
ADJUST_STREAM = 2
REPAIR_STREAM = 3


@dataclass(frozen=True)
class FaParams:
    n_fireflies: int = 15
    alpha0: float = 0.3
    beta0: float = 1.0
    gamma: float = 1.0
    delta: float = 0.95
    max_gens: int = 100

    def __post_init__(self):
        if self.n_fireflies < 1 or self.max_gens < 1:
            raise ValueError("n_fireflies and max_gens must be positive")
        if self.alpha0 < 0 or self.gamma < 0:
            raise ValueError("alpha0 and gamma must be >= 0")
        if self.beta0 < 0:
            raise ValueError("beta0 must be >= 0")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")


@dataclass
class FixedKResult:
    best: Firefly
    breakdown: FitnessBreakdown
    history: list[float] = field(default_factory=list)
    wcss: float = 0.0

    @property
    def k(self) -> int:
        return self.best.k


def attraction(r: float, beta0: float, gamma: float) -> float:
    return beta0 * math.exp(-gamma * r * r)


def decay_alpha(alpha_t: float, delta: float) -> float:
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    return alpha_t * delta


def move_firefly(
    x_i: Firefly,
    x_j: Firefly,
    params: FaParams,
    alpha_t: float,
    rng: RngStream,
    data: Dataset,
) -> Firefly:
    """Move ``x_i`` toward ``x_j`` treating both as flat ``k * D`` vectors.

    The attraction distance is measured with every coordinate divided by
    its bounding-box extent, and the random step is ``alpha_t * (u - 0.5)``
    times that extent, so the dynamics do not depend on the data's units.
    The result is clamped to the bounding box.
    """
    if x_i.k != x_j.k or x_i.dim != x_j.dim:
        raise ValueError(f"cannot move a k={x_i.k} firefly toward k={x_j.k}")
    a = x_i.centroids
    b = x_j.centroids
    r = float(np.sqrt((((a - b) / _safe_extent(data)) ** 2).sum()))
    beta = attraction(r, params.beta0, params.gamma)
    noise = alpha_t * (rng.random(a.shape) - 0.5) * data.extent
    return Firefly(data.clamp(a + beta * (b - a) + noise))


def _safe_extent(data: Dataset) -> np.ndarray:
    # a flat dimension (all points share the coordinate) contributes no distance
    ext = data.extent
    return np.where(ext > 0, ext, 1.0)


def wcss(data: Dataset, f: Firefly) -> float:
    """Sum of squared distances from each point to its nearest centroid."""
    labels = assign_labels(data.points, f.centroids)
    diff = data.points - f.centroids[labels]
    return float((diff**2).sum())


def random_centroids(data: Dataset, k: int, rng: RngStream) -> np.ndarray:
    """Indices of ``k`` distinct data points."""
    if k > data.n_points:
        raise ValueError(f"k={k} exceeds the number of points ({data.n_points})")
    return rng.choice(data.n_points, k, replace=False)


def run_fixed_k(
    data: Dataset,
    k: int,
    params: FaParams | None = None,
    w: FitnessWeights | None = None,
    bounds: NormalizationBounds | None = None,
    rng: RngStream | None = None,
    separation_term: str = "intent",
    observer: Callable[[int, list[Firefly], float], None] | None = None,
) -> FixedKResult:
    """Minimise the clustering fitness over fireflies of exactly ``k`` centroids.

    Movement is synchronous: every firefly moves toward each strictly fitter
    member of the previous generation's snapshot, in fitness-rank order, and
    the moved positions are evaluated together at the end of the generation.
    ``observer(gen, population, best_total)`` is called after each generation.
    """
    if not 1 <= k <= data.n_points:
        raise ValueError(f"k must lie in [1, {data.n_points}], got {k}")
    params = params or FaParams()
    w = w or FitnessWeights()
    bounds = resolve_bounds(data, bounds)
    rng = rng or RngStream(0)

    def score(f):
        return evaluate(data, f, w, bounds, separation_term)

    init = rng.derive(INIT_STREAM)
    pop = [Firefly(data.points[random_centroids(data, k, init)]) for _ in range(params.n_fireflies)]
    fits = [score(f) for f in pop]
    i0 = min(range(len(pop)), key=lambda i: fits[i].total)
    best, best_bd = pop[i0], fits[i0]

    alpha = params.alpha0
    history = []
    for gen in range(params.max_gens):
        totals = np.array([b.total for b in fits])
        order = np.argsort(totals, kind="stable")
        moved = list(pop)
        for i in order:
            stream = rng.derive(MOVE_STREAM, gen, int(i))
            x = pop[i]
            for j in order:
                if totals[j] < totals[i]:
                    x = move_firefly(x, pop[j], params, alpha, stream, data)
            moved[i] = x
        pop = moved
        alpha = decay_alpha(alpha, params.delta)
        fits = [score(f) for f in pop]
        for f, bd in zip(pop, fits):
            if bd.total < best_bd.total:
                best, best_bd = f, bd
        history.append(best_bd.total)
        if observer is not None:
            observer(gen, pop, best_bd.total)

    return FixedKResult(best, best_bd, history, wcss(data, best))
