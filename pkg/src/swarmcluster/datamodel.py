"""Core domain types: datasets, fireflies, partitions and seeded random streams."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# Above this size the diameter falls back to the bounding-box diagonal and no
# full distance matrix is kept.
EXACT_DIAMETER_LIMIT = 2000

_SPLIT = re.compile(r"[,\s]+")


class DatasetError(ValueError):
    """Raised for unreadable or degenerate point files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RaggedRowError(DatasetError):
    pass


class NonNumericError(DatasetError):
    pass


class TooFewPointsError(DatasetError):
    pass


class AllPointsIdenticalError(DatasetError):
    pass


class DimensionMismatchError(ValueError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable set of ``n`` points in ``D`` dimensions.

    Bounds and diameter are computed once at construction. For datasets up to
    ``EXACT_DIAMETER_LIMIT`` points the full pairwise distance matrix is kept
    and reused by the tour heuristics.
    """

    points: np.ndarray
    bbox_min: np.ndarray = field(init=False)
    bbox_max: np.ndarray = field(init=False)
    diameter: float = field(init=False)
    distances: np.ndarray | None = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] < 1:
            raise DatasetError("points must form an (n, D) array")
        if pts.shape[0] < 2:
            raise TooFewPointsError(f"need at least 2 points, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("points contain NaN or Inf")
        if np.all(pts == pts[0]):
            raise AllPointsIdenticalError("all points are identical")

        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        n = pts.shape[0]
        if n <= EXACT_DIAMETER_LIMIT:
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
            diameter = float(dist.max())
            dist = _readonly(dist)
        else:
            dist = None
            diameter = float(np.linalg.norm(hi - lo))

        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "bbox_min", _readonly(lo))
        object.__setattr__(self, "bbox_max", _readonly(hi))
        object.__setattr__(self, "diameter", diameter)
        object.__setattr__(self, "distances", dist)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def extent(self) -> np.ndarray:
        """Per-dimension width of the bounding box."""
        return self.bbox_max - self.bbox_min

    def distance_submatrix(self, idx: Sequence[int] | np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.intp)
        if self.distances is not None:
            return self.distances[np.ix_(idx, idx)]
        return pairwise_distances(self.points[idx])

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.bbox_min, self.bbox_max)

    def summary(self) -> dict:
        return {
            "n_points": self.n_points,
            "dim": self.dim,
            "bbox_min": self.bbox_min.tolist(),
            "bbox_max": self.bbox_max.tolist(),
            "diameter": self.diameter,
        }


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


@dataclass(frozen=True, eq=False)
class Firefly:
    """A candidate solution: an ordered ``(k, D)`` array of centroids."""

    centroids: np.ndarray

    def __post_init__(self):
        c = np.array(self.centroids, dtype=float, copy=True)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError("a firefly needs at least one centroid")
        object.__setattr__(self, "centroids", _readonly(c))

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def is_distinct(self) -> bool:
        return np.unique(self.centroids, axis=0).shape[0] == self.k

    def __eq__(self, other):
        if not isinstance(other, Firefly):
            return NotImplemented
        return self.centroids.shape == other.centroids.shape and bool(
            np.array_equal(self.centroids, other.centroids)
        )

    def __hash__(self):
        return hash((self.centroids.shape, self.centroids.tobytes()))


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of every point to exactly one of ``k`` clusters."""

    assignment: np.ndarray
    clusters: tuple[np.ndarray, ...]
    centroids: Firefly

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.clusters], dtype=int)


class RngStream:
    """A reproducible random stream keyed by ``(seed, stream id)``.

    Backed by numpy's PCG64 seeded through ``SeedSequence`` so the output
    sequence does not depend on platform. ``derive`` produces independent
    child streams keyed by extra integers (run, generation, firefly, ...),
    which keeps results independent of evaluation order.
    """

    def __init__(self, seed: int, stream: int = 0, _path: tuple[int, ...] = ()):
        if not 0 <= int(seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 <= int(stream) < 2**64:
            raise ValueError("stream id must be an unsigned 64-bit integer")
        self.seed = int(seed)
        self.stream = int(stream)
        self._path = (self.stream, *_path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self._path)
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def derive(self, *keys: int) -> "RngStream":
        return RngStream(self.seed, self.stream, (*self._path[1:], *map(int, keys)))

    def random(self, size=None):
        return self.generator.random(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self.generator.choice(n, size=size, replace=replace)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self._path})"


def parse_points(lines: Iterable[str]) -> np.ndarray:
    rows: list[list[float]] = []
    width = None
    lineno = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_float(t))
            raise NonNumericError(f"non-numeric token {bad!r}", lineno) from None
        if not all(np.isfinite(values)):
            raise NonNumericError("non-finite value", lineno)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise RaggedRowError(f"expected {width} columns, got {len(values)}", lineno)
        rows.append(values)
    if len(rows) < 2:
        raise TooFewPointsError(f"need at least 2 points, got {len(rows)}", lineno or None)
    pts = np.array(rows, dtype=float)
    if np.all(pts == pts[0]):
        raise AllPointsIdenticalError("all points are identical", lineno)
    return pts


def _is_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_dataset(path: str | Path) -> Dataset:
    """Read a whitespace- or comma-separated point file.

    Lines starting with ``#`` and blank lines are skipped. Errors carry the
    1-based line number where they were detected.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            pts = parse_points(fh)
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return Dataset(pts)


def _check_dim(points: np.ndarray, f: Firefly) -> None:
    if points.shape[-1] != f.dim:
        raise DimensionMismatchError(
            f"point dimension {points.shape[-1]} != centroid dimension {f.dim}"
        )


def nearest_centroid(p: Sequence[float] | np.ndarray, f: Firefly) -> int:
    """Index of the closest centroid; ties go to the lowest index."""
    p = np.asarray(p, dtype=float)
    _check_dim(p, f)
    d2 = ((f.centroids - p) ** 2).sum(axis=1)
    return int(np.argmin(d2))


def assign_labels(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return np.argmin(d2, axis=1)


def assign(data: Dataset, f: Firefly) -> Partition:
    """Nearest-centroid partition of ``data``. Empty clusters are allowed."""
    _check_dim(data.points, f)
    labels = assign_labels(data.points, f.centroids)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(f.k + 1))
    clusters = tuple(
        _readonly(order[bounds[c] : bounds[c + 1]].copy()) for c in range(f.k)
    )
    return Partition(assignment=_readonly(labels), clusters=clusters, centroids=f)
