"""Closed-tour providers: nearest-neighbour, exhaustive search and Ant Colony System."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from swarmcluster.datamodel import Dataset, Partition, RngStream, pairwise_distances

BRUTE_FORCE_LIMIT = 10
_MIN_EDGE = 1e-12


@dataclass(frozen=True)
class Route:
    """Closed tour. ``order`` indexes the point list the tour was built on."""

    order: tuple[int, ...]
    length: float

    def recompute(self, points: np.ndarray) -> float:
        return tour_length(points, self.order)


@dataclass(frozen=True)
class AcsParams:
    n_ants: int = 10
    n_iters: int = 200
    beta: float = 2.0
    rho: float = 0.1
    phi: float = 0.1
    q0: float = 0.9
    tau0: float | None = None  # None -> 1 / (n * nn_tour_length)

    def __post_init__(self):
        if self.n_ants < 1 or self.n_iters < 1:
            raise ValueError("n_ants and n_iters must be positive")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if not (0 < self.rho < 1 and 0 < self.phi < 1):
            raise ValueError("rho and phi must lie in (0, 1)")
        if not 0 <= self.q0 <= 1:
            raise ValueError("q0 must lie in [0, 1]")
        if self.tau0 is not None and self.tau0 <= 0:
            raise ValueError("tau0 must be positive")


@dataclass(frozen=True)
class RouteSummary:
    routes: tuple[Route, ...]  # orders are dataset point indices
    total: float

    @property
    def lengths(self) -> list[float]:
        return [r.length for r in self.routes]


def tour_length(points: np.ndarray, order) -> float:
    pts = np.asarray(points, dtype=float)[list(order)]
    if len(pts) < 2:
        return 0.0
    seg = pts - np.roll(pts, -1, axis=0)
    return float(np.sqrt((seg**2).sum(axis=1)).sum())


def _matrix_length(dist: np.ndarray, order: np.ndarray) -> float:
    return float(dist[order, np.roll(order, -1)].sum())


def _as_matrix(points, dist):
    if dist is not None:
        return np.asarray(dist, dtype=float)
    return pairwise_distances(np.asarray(points, dtype=float))


def nn_order(dist: np.ndarray, start: int = 0) -> np.ndarray:
    """Greedy nearest-unvisited order over a distance matrix, ties to lowest index."""
    n = dist.shape[0]
    work = np.array(dist, dtype=float, copy=True)
    work[:, start] = np.inf
    order = [start]
    cur = start
    for _ in range(n - 1):
        cur = work[cur].argmin()
        order.append(cur)
        work[:, cur] = np.inf
    return np.array(order, dtype=np.intp)


def nn_tour_length(dist: np.ndarray, start: int = 0) -> float:
    return _matrix_length(dist, nn_order(dist, start))


def nn_tour(points, start: int = 0, dist: np.ndarray | None = None) -> Route:
    """Nearest-neighbour closed tour starting (and ending) at ``start``."""
    m = _as_matrix(points, dist)
    if m.shape[0] < 2:
        raise ValueError("a tour needs at least 2 points")
    if not 0 <= start < m.shape[0]:
        raise IndexError(f"start index {start} out of range")
    order = nn_order(m, start)
    return Route(tuple(int(i) for i in order), _matrix_length(m, order))


def brute_force_tour(points, dist: np.ndarray | None = None) -> Route:
    """Exact optimum by enumerating all (n-1)!/2 distinct closed tours."""
    m = _as_matrix(points, dist)
    n = m.shape[0]
    if n < 2:
        raise ValueError("a tour needs at least 2 points")
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_LIMIT} points")
    if n <= 3:
        order = np.arange(n)
        return Route(tuple(range(n)), _matrix_length(m, order))
    # point 0 fixed first; keep one direction of each tour
    perms = np.array(
        [p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]], dtype=np.intp
    )
    tours = np.hstack([np.zeros((len(perms), 1), dtype=np.intp), perms])
    lengths = m[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
    best = int(np.argmin(lengths))
    return Route(tuple(int(i) for i in tours[best]), float(lengths[best]))


def acs_tour(
    points,
    params: AcsParams | None = None,
    rng: RngStream | None = None,
    dist: np.ndarray | None = None,
) -> Route:
    """Ant Colony System tour.

    Ants build tours in lock-step. At each step an ant exploits the edge with
    the largest ``tau * eta**beta`` with probability ``q0`` and otherwise
    samples proportionally to it. Every traversed edge gets the local update
    ``tau <- (1 - phi) tau + phi tau0``; after each iteration the best-so-far
    tour gets ``tau <- (1 - rho) tau + rho / L_best``.
    """
    params = params or AcsParams()
    rng = rng or RngStream(0)
    m = _as_matrix(points, dist)
    n = m.shape[0]
    if n <= 2:
        return nn_tour(None, dist=m)
    if not np.all(np.isfinite(m)):
        raise ValueError("distances must be finite")
    if not np.any(m > 0):
        return Route(tuple(range(n)), 0.0)

    tau0 = params.tau0
    if tau0 is None:
        tau0 = 1.0 / (n * nn_tour_length(m))
    eta_b = (1.0 / np.maximum(m, _MIN_EDGE)) ** params.beta
    tau = np.full((n, n), tau0)
    ants = params.n_ants
    rows = np.arange(ants)
    best_order = None
    best_len = math.inf

    for _ in range(params.n_iters):
        tours = np.empty((ants, n), dtype=np.intp)
        cur = rng.integers(0, n, size=ants)
        tours[:, 0] = cur
        visited = np.zeros((ants, n), dtype=bool)
        visited[rows, cur] = True
        draws = rng.random((n - 1, 2, ants))
        for step in range(1, n):
            attract = tau[cur] * eta_b[cur]
            attract[visited] = 0.0
            greedy = np.argmax(attract, axis=1)
            cums = np.cumsum(attract, axis=1)
            thresh = draws[step - 1, 1] * cums[:, -1]
            sampled = np.minimum((cums <= thresh[:, None]).sum(axis=1), n - 1)
            nxt = np.where(draws[step - 1, 0] < params.q0, greedy, sampled)
            # all-zero rows (underflow) fall back to the greedy pick
            nxt = np.where(visited[rows, nxt], greedy, nxt)
            _local_update(tau, cur, nxt, params.phi, tau0)
            visited[rows, nxt] = True
            tours[:, step] = nxt
            cur = nxt
        _local_update(tau, cur, tours[:, 0], params.phi, tau0)

        lengths = m[tours, np.roll(tours, -1, axis=1)].sum(axis=1)
        i = int(np.argmin(lengths))
        if lengths[i] < best_len:
            best_len = float(lengths[i])
            best_order = tours[i].copy()
        a, b = best_order, np.roll(best_order, -1)
        tau[a, b] = (1 - params.rho) * tau[a, b] + params.rho / max(best_len, _MIN_EDGE)
        tau[b, a] = tau[a, b]

    return Route(tuple(int(i) for i in best_order), best_len)


def _local_update(tau, a, b, phi, tau0):
    tau[a, b] = (1 - phi) * tau[a, b] + phi * tau0
    tau[b, a] = tau[a, b]


def cluster_route_total(
    part: Partition,
    data: Dataset,
    method: str = "nn",
    params: AcsParams | None = None,
    rng: RngStream | None = None,
) -> RouteSummary:
    """Closed tour per cluster (dataset indices) and the grand total."""
    if method not in ("nn", "acs"):
        raise ValueError(f"unknown route method {method!r}")
    rng = rng or RngStream(0)
    routes = []
    for c, members in enumerate(part.clusters):
        members = np.asarray(members, dtype=np.intp)
        if len(members) <= 1:
            routes.append(Route(tuple(int(i) for i in members), 0.0))
            continue
        sub = data.distance_submatrix(members)
        if method == "acs":
            local = acs_tour(None, params, rng.derive(c), dist=sub)
        else:
            local = nn_tour(None, 0, dist=sub)
        routes.append(Route(tuple(int(members[i]) for i in local.order), local.length))
    return RouteSummary(tuple(routes), float(sum(r.length for r in routes)))
