"""Weighted, normalised clustering fitness: compactness, separation and tour penalty.

Lower totals are fitter.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from swarmcluster.datamodel import Dataset, Firefly, Partition, assign
from swarmcluster.tsp import nn_tour_length

SEPARATION_TERMS = ("intent", "paper-literal")


@dataclass(frozen=True)
class FitnessWeights:
    # tuned on held-out blob fields, see README
    w_comp: float = 0.58
    w_sep: float = 0.14
    w_tsp: float = 0.28

    def __post_init__(self):
        ws = (self.w_comp, self.w_sep, self.w_tsp)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ValueError("fitness weights must be finite and non-negative")
        if sum(ws) <= 0:
            raise ValueError("at least one fitness weight must be positive")

    @classmethod
    def parse(cls, text: str) -> "FitnessWeights":
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError("weights must be three comma-separated numbers")
        return cls(*(float(p) for p in parts))


@dataclass(frozen=True)
class NormalizationBounds:
    max_compactness: float
    max_separation: float
    max_tsp_penalty: float

    def __post_init__(self):
        for v in (self.max_compactness, self.max_separation, self.max_tsp_penalty):
            if not (math.isfinite(v) and v > 0):
                raise ValueError("normalisation bounds must be positive and finite")

    @classmethod
    def parse(cls, text: str) -> "NormalizationBounds":
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 3:
            raise ValueError("bounds must be 'auto' or three comma-separated numbers")
        return cls(*(float(p) for p in parts))


@dataclass(frozen=True)
class FitnessBreakdown:
    compactness_raw: float
    compactness_norm: float
    separation_raw: float
    separation_norm: float
    tsp_penalty_raw: float
    tsp_penalty_norm: float
    total: float

    def to_dict(self) -> dict:
        return asdict(self)


def default_bounds(data: Dataset) -> NormalizationBounds:
    """Bounds that dominate every raw term for any firefly drawn from ``data``.

    Any point-to-centroid or centroid-to-centroid distance is at most the
    diameter, and a cluster of ``m >= 2`` points has a tour of at most
    ``m * diameter`` divided by ``ln(1 + m) >= ln 3``.
    """
    if data.diameter <= 0:
        raise ValueError("dataset diameter is zero")
    d = data.diameter
    return NormalizationBounds(d, d, data.n_points * d / math.log(2))


def empirical_bounds(
    data: Dataset,
    samples: int = 256,
    k_range: tuple[int, int] = (2, 10),
    seed: int = 0,
) -> NormalizationBounds:
    """Largest raw terms observed over random data-point fireflies.

    Each sample draws ``k`` uniformly from ``k_range`` (capped at the number
    of points) and ``k`` distinct data points as centroids. The sample stream
    is fixed by ``seed`` so the bounds are a deterministic function of the
    dataset. Unlike :func:`default_bounds` these track the scale that real
    solutions occupy, so no term is flattened to near zero.
    """
    from swarmcluster.datamodel import Firefly, RngStream

    lo = min(k_range[0], data.n_points)
    hi = min(k_range[1], data.n_points)
    rng = RngStream(seed, stream=0xB0D5)
    comp = sep = tsp = 0.0
    for _ in range(samples):
        k = int(rng.integers(lo, hi + 1))
        f = Firefly(data.points[rng.choice(data.n_points, k, replace=False)])
        part = assign(data, f)
        comp = max(comp, compactness(part, data))
        if k >= 2:
            sep = max(sep, separation(f))
        tsp = max(tsp, tsp_penalty(part, data))
    fallback = default_bounds(data)
    return NormalizationBounds(
        comp if comp > 0 else fallback.max_compactness,
        sep if sep > 0 else fallback.max_separation,
        tsp if tsp > 0 else fallback.max_tsp_penalty,
    )


def resolve_bounds(data: Dataset, spec: str | NormalizationBounds | None = None) -> NormalizationBounds:
    """``None``/``"auto"`` -> empirical, ``"theory"`` -> :func:`default_bounds`, or ``"c,s,t"``."""
    if isinstance(spec, NormalizationBounds):
        return spec
    if spec is None or spec == "auto":
        return empirical_bounds(data)
    if spec == "theory":
        return default_bounds(data)
    return NormalizationBounds.parse(spec)


def compactness(part: Partition, data: Dataset) -> float:
    """Mean over clusters of the mean member-to-centroid distance.

    Empty and singleton clusters are skipped, so parking a centroid on a lone
    outlier cannot shrink the average. With no cluster of two or more
    members the result is 0.
    """
    if all(len(m) == 0 for m in part.clusters):
        raise ValueError("all clusters are empty")
    per_cluster = []
    cents = part.centroids.centroids
    for c, members in enumerate(part.clusters):
        if len(members) < 2:
            continue
        diff = data.points[members] - cents[c]
        per_cluster.append(np.sqrt((diff**2).sum(axis=1)).mean())
    if not per_cluster:
        return 0.0
    return float(np.mean(per_cluster))


def separation(f: Firefly) -> float:
    """Mean Euclidean distance over unordered centroid pairs."""
    if f.k < 2:
        raise ValueError("separation needs at least two centroids")
    c = f.centroids
    iu = np.triu_indices(f.k, k=1)
    diff = c[iu[0]] - c[iu[1]]
    return float(np.sqrt((diff**2).sum(axis=1)).mean())


def tsp_penalty(
    part: Partition,
    data: Dataset,
    tour_fn: Callable[[np.ndarray], float] | None = None,
) -> float:
    """Sum of closed-tour length / ln(1 + |C|) over clusters with 2+ members.

    ``tour_fn`` maps an ``(m, D)`` array of member points to a closed tour
    length. The default is the nearest-neighbour tour from the first member.
    """
    total = 0.0
    for members in part.clusters:
        m = len(members)
        if m < 2:
            continue
        if tour_fn is None:
            length = nn_tour_length(data.distance_submatrix(members), 0)
        else:
            length = float(tour_fn(data.points[members]))
        total += length / math.log1p(m)
    return total


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def combine(
    comp: float,
    sep: float,
    tsp: float,
    w: FitnessWeights,
    b: NormalizationBounds,
    separation_term: str = "intent",
) -> FitnessBreakdown:
    comp_n = _clamp01(comp / b.max_compactness)
    sep_n = _clamp01(sep / b.max_separation)
    tsp_n = _clamp01(tsp / b.max_tsp_penalty)
    if separation_term == "intent":
        sep_term = 1.0 - sep_n
    elif separation_term == "paper-literal":
        sep_term = sep_n
    else:
        raise ValueError(f"unknown separation term {separation_term!r}")
    total = w.w_comp * comp_n + w.w_sep * sep_term + w.w_tsp * tsp_n
    return FitnessBreakdown(comp, comp_n, sep, sep_n, tsp, tsp_n, total)


def evaluate_partition(
    part: Partition,
    data: Dataset,
    w: FitnessWeights,
    b: NormalizationBounds,
    separation_term: str = "intent",
    tour_fn: Callable[[np.ndarray], float] | None = None,
) -> FitnessBreakdown:
    f = part.centroids
    # a single centroid has no pairs; its separation is taken as zero
    sep = separation(f) if f.k >= 2 else 0.0
    return combine(
        compactness(part, data),
        sep,
        tsp_penalty(part, data, tour_fn),
        w,
        b,
        separation_term,
    )


def evaluate(
    data: Dataset,
    f: Firefly,
    w: FitnessWeights | None = None,
    b: NormalizationBounds | None = None,
    separation_term: str = "intent",
    tour_fn: Callable[[np.ndarray], float] | None = None,
) -> FitnessBreakdown:
    """Assign ``data`` to ``f`` and score the resulting partition."""
    w = w or FitnessWeights()
    b = b or default_bounds(data)
    return evaluate_partition(assign(data, f), data, w, b, separation_term, tour_fn)
