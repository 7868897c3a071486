"""Firefly clustering with an automatically chosen number of clusters.

Fireflies carry between ``k_min`` and ``k_max`` centroids. A firefly moves
toward a fitter one centroid by centroid, each centroid pulled toward its
nearest counterpart in the fitter firefly. After every move the centroid
count may grow or shrink with a probability that decays linearly over the
run, and at the end of each generation all centroids are snapped back onto
dataset points.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from swarmcluster.datamodel import Dataset, Firefly, RngStream, assign, assign_labels
from swarmcluster.fa_core import (
    ADJUST_STREAM,
    INIT_STREAM,
    MOVE_STREAM,
    REPAIR_STREAM,
    FaParams,
    decay_alpha,
    wcss,
)
from swarmcluster.fitness import (
    FitnessBreakdown,
    FitnessWeights,
    NormalizationBounds,
    resolve_bounds,
    evaluate_partition,
)


def _auto_fa_defaults() -> FaParams:
    return FaParams(n_fireflies=15, alpha0=0.5, beta0=1.0, gamma=1.0, delta=0.95, max_gens=250)


@dataclass(frozen=True)
class AutoKParams:
    k_min: int = 2
    k_max: int = 10
    initial_prob: float = 0.2
    final_prob: float = 0.1
    num_runs: int = 6
    fa: FaParams = field(default_factory=_auto_fa_defaults)

    def __post_init__(self):
        if self.k_min < 2:
            raise ValueError("k_min must be at least 2")
        if self.k_max < self.k_min:
            raise ValueError("k_max must be >= k_min")
        for p in (self.initial_prob, self.final_prob):
            if not 0 <= p <= 1:
                raise ValueError("add/remove probabilities must lie in [0, 1]")
        if self.initial_prob < self.final_prob:
            raise ValueError("initial_prob must be >= final_prob")
        if self.num_runs < 1:
            raise ValueError("num_runs must be positive")


@dataclass
class RunResult:
    best: Firefly
    breakdown: FitnessBreakdown
    k: int
    wcss: float
    history: list[float] = field(default_factory=list)


@dataclass
class AutoResult:
    runs: list[RunResult]
    best_index: int

    @property
    def best(self) -> RunResult:
        return self.runs[self.best_index]


def adaptive_prob(gen: int, max_gens: int, p: AutoKParams) -> float:
    """Add/remove probability, linear from ``initial_prob`` to ``final_prob``."""
    if max_gens < 2:
        return p.initial_prob
    if not 0 <= gen < max_gens:
        raise ValueError(f"generation {gen} outside [0, {max_gens})")
    return p.initial_prob + (p.final_prob - p.initial_prob) * gen / (max_gens - 1)


def init_population(data: Dataset, p: AutoKParams, rng: RngStream) -> list[Firefly]:
    if p.k_max > data.n_points:
        raise ValueError(f"k_max={p.k_max} exceeds the number of points ({data.n_points})")
    pop = []
    for _ in range(p.fa.n_fireflies):
        k = int(rng.integers(p.k_min, p.k_max + 1))
        pop.append(Firefly(data.points[rng.choice(data.n_points, k, replace=False)]))
    return pop


def _nearest_rows(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each row of ``a``, the index of and squared distance to the nearest row of ``b``."""
    diff = a[:, None, :] - b[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    idx = np.argmin(d2, axis=1)
    return idx, d2[np.arange(len(a)), idx]


def move_toward_fitter(
    f1: Firefly,
    f2: Firefly,
    params: FaParams,
    alpha_t: float,
    rng: RngStream,
    data: Dataset,
) -> Firefly:
    """Pull every centroid of ``f1`` toward its nearest centroid in ``f2``.

    Matching is many-to-one; ``f1`` keeps its centroid count.
    """
    c1 = f1.centroids
    idx, d2 = _nearest_rows(c1, f2.centroids)
    target = f2.centroids[idx]
    # per-centroid attraction, same law as ``attraction``
    beta = params.beta0 * np.exp(-params.gamma * d2)
    noise = alpha_t * (rng.random(c1.shape) - 0.5) * data.extent
    moved = (1.0 - beta)[:, None] * c1 + beta[:, None] * target + noise
    return Firefly(data.clamp(moved))


def adjust_k(
    f: Firefly,
    data: Dataset,
    prob: float,
    p: AutoKParams,
    rng: RngStream,
) -> Firefly:
    """With probability ``prob`` add a data point as a centroid or drop one.

    A fair coin picks the direction; if that direction would leave
    ``[k_min, k_max]`` the other one is tried, otherwise nothing changes.
    """
    if rng.random() >= prob:
        return f
    want_add = rng.random() < 0.5
    c = f.centroids
    # data points not already occupied by a centroid
    free = ~(data.points[:, None, :] == c[None, :, :]).all(axis=2).any(axis=1)
    can_add = f.k < p.k_max and bool(free.any())
    can_remove = f.k > p.k_min
    if want_add and not can_add:
        want_add = False
    elif not want_add and not can_remove:
        want_add = True
    if want_add and can_add:
        choices = np.flatnonzero(free)
        pick = choices[int(rng.integers(0, len(choices)))]
        return Firefly(np.vstack([c, data.points[pick]]))
    if not want_add and can_remove:
        drop = int(rng.integers(0, f.k))
        return Firefly(np.delete(c, drop, axis=0))
    return f


def _snap_indices(f: Firefly, data: Dataset) -> np.ndarray:
    idx, _ = _nearest_rows(f.centroids, data.points)
    _, first = np.unique(idx, return_index=True)
    return idx[np.sort(first)]


def _fill_to(idx: np.ndarray, k: int, data: Dataset, rng: RngStream) -> np.ndarray:
    if len(idx) >= k:
        return idx
    pts = data.points
    taken = np.zeros(data.n_points, dtype=bool)
    for i in idx:
        taken |= (pts == pts[i]).all(axis=1)
    choices = np.flatnonzero(~taken)
    extra = rng.choice(len(choices), min(k - len(idx), len(choices)), replace=False)
    return np.concatenate([idx, choices[extra]])


def snap_to_data(f: Firefly, data: Dataset, p: AutoKParams, rng: RngStream) -> Firefly:
    """Replace each centroid by its nearest data point and collapse duplicates.

    If collapsing leaves fewer than ``k_min`` centroids, random unused data
    points are appended.
    """
    return Firefly(data.points[_fill_to(_snap_indices(f, data), p.k_min, data, rng)])


def _repair_empty(idx: np.ndarray, data: Dataset, rng: RngStream) -> np.ndarray:
    """Reseed centroids that own no points to random unused data points."""
    idx = idx.copy()
    for _ in range(len(idx) + 1):
        counts = np.bincount(assign_labels(data.points, data.points[idx]), minlength=len(idx))
        empty = np.flatnonzero(counts == 0)
        if len(empty) == 0:
            break
        free = np.setdiff1d(np.arange(data.n_points), idx)
        if len(free) == 0:
            break
        idx[empty[0]] = free[int(rng.integers(0, len(free)))]
    return idx


class _Scorer:
    """Memoised fitness over centroid sets given as dataset indices."""

    def __init__(self, data, w, bounds, separation_term):
        self.data = data
        self.w = w
        self.bounds = bounds
        self.separation_term = separation_term
        self._cache: dict[tuple[int, ...], FitnessBreakdown] = {}

    def __call__(self, idx: np.ndarray) -> FitnessBreakdown:
        key = tuple(int(i) for i in idx)
        bd = self._cache.get(key)
        if bd is None:
            part = assign(self.data, Firefly(self.data.points[idx]))
            bd = evaluate_partition(part, self.data, self.w, self.bounds, self.separation_term)
            self._cache[key] = bd
        return bd


def find_clusters(
    data: Dataset,
    p: AutoKParams | None = None,
    w: FitnessWeights | None = None,
    bounds: NormalizationBounds | None = None,
    rng: RngStream | None = None,
    separation_term: str = "intent",
    observer: Callable[[int, list[Firefly], float], None] | None = None,
) -> RunResult:
    """One automatic-K run.

    ``observer``, if given, is called once per generation with the
    generation index, the evaluated (repaired, snapped) population and the
    best-so-far total.
    """
    p = p or AutoKParams()
    w = w or FitnessWeights()
    bounds = resolve_bounds(data, bounds)
    rng = rng or RngStream(0)
    fa = p.fa
    score = _Scorer(data, w, bounds, separation_term)

    init = rng.derive(INIT_STREAM)
    pop = [
        _fill_to(_snap_indices(f, data), p.k_min, data, init)
        for f in init_population(data, p, init)
    ]
    best_idx = None
    best_bd = None
    alpha = fa.alpha0
    history = []

    for gen in range(fa.max_gens):
        prob = adaptive_prob(gen, fa.max_gens, p)
        pop = [_repair_empty(idx, data, rng.derive(REPAIR_STREAM, gen, i)) for i, idx in enumerate(pop)]
        fits = [score(idx) for idx in pop]
        totals = np.array([b.total for b in fits])
        order = np.argsort(totals, kind="stable")
        lead = int(order[0])
        if best_bd is None or totals[lead] < best_bd.total:
            best_idx, best_bd = pop[lead].copy(), fits[lead]
        history.append(best_bd.total)

        snapshot = [Firefly(data.points[idx]) for idx in pop]
        if observer is not None:
            observer(gen, snapshot, best_bd.total)
        moved = list(pop)
        for i in order:
            if not np.any(totals < totals[i]):
                continue
            move_rng = rng.derive(MOVE_STREAM, gen, int(i))
            adjust_rng = rng.derive(ADJUST_STREAM, gen, int(i))
            x = snapshot[i]
            for j in order:
                if totals[j] < totals[i]:
                    x = move_toward_fitter(x, snapshot[j], fa, alpha, move_rng, data)
                    x = adjust_k(x, data, prob, p, adjust_rng)
            snapped = _fill_to(_snap_indices(x, data), p.k_min, data, adjust_rng)
            moved[i] = snapped
        pop = moved
        alpha = decay_alpha(alpha, fa.delta)

    best = Firefly(data.points[best_idx])
    return RunResult(best, best_bd, best.k, wcss(data, best), history)


def _run_one(args) -> RunResult:
    data, p, w, bounds, seed, run, separation_term = args
    return find_clusters(data, p, w, bounds, RngStream(seed).derive(run), separation_term)


def auto_cluster(
    data: Dataset,
    p: AutoKParams | None = None,
    w: FitnessWeights | None = None,
    bounds: NormalizationBounds | None = None,
    seed: int = 0,
    separation_term: str = "intent",
    workers: int = 1,
) -> AutoResult:
    """Independent runs of :func:`find_clusters`; the lowest total fitness wins."""
    p = p or AutoKParams()
    w = w or FitnessWeights()
    bounds = resolve_bounds(data, bounds)
    jobs = [(data, p, w, bounds, seed, run, separation_term) for run in range(p.num_runs)]
    if workers > 1 and p.num_runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, p.num_runs)) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(job) for job in jobs]
    best = min(range(len(runs)), key=lambda r: runs[r].breakdown.total)
    return AutoResult(runs, best)
