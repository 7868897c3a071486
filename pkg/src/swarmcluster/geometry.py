"""2D convex hulls for cluster boundaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Hull:
    vertices: np.ndarray  # (h, 2), counter-clockwise
    area: float

    def contains(self, p, tol: float = 1e-9) -> bool:
        return point_in_hull(self, p, tol)

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist(), "area": self.area}


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def shoelace_area(vertices: np.ndarray) -> float:
    if len(vertices) < 3:
        return 0.0
    x, y = vertices[:, 0], vertices[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def convex_hull(points) -> Hull:
    """Monotone-chain hull.

    Vertices run counter-clockwise from the lowest-x (then lowest-y) point and
    collinear boundary points are dropped. A single distinct point yields one
    vertex and a collinear set yields its two endpoints.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("convex hulls are only defined here for 2D points")
    if len(pts) < 1:
        raise ValueError("need at least one point")
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) <= 2:
        return Hull(np.array(uniq), 0.0)

    lower: list[tuple[float, float]] = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = np.array(lower[:-1] + upper[:-1])
    return Hull(verts, shoelace_area(verts))


def point_in_hull(hull: Hull, p, tol: float = 1e-9) -> bool:
    """True if ``p`` lies inside or on the hull (within ``tol``)."""
    v = hull.vertices
    p = np.asarray(p, dtype=float)
    if len(v) == 1:
        return bool(np.linalg.norm(p - v[0]) <= tol)
    if len(v) == 2:
        a, b = v
        ab = b - a
        t = np.dot(p - a, ab) / np.dot(ab, ab)
        if t < -tol or t > 1 + tol:
            return False
        return bool(np.linalg.norm(a + np.clip(t, 0, 1) * ab - p) <= tol)
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        edge = np.linalg.norm(b - a)
        if _cross(a, b, p) < -tol * max(edge, 1.0):
            return False
    return True
