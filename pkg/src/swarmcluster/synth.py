"""Synthetic point fields: Gaussian blobs, uniform fields and corridor layouts."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from swarmcluster.datamodel import RngStream


def blob_centers(n_blobs: int, box: float, min_sep: float, rng: RngStream, max_tries: int = 10000) -> np.ndarray:
    """Rejection-sample ``n_blobs`` centers in ``[0, box]^2`` at least ``min_sep`` apart."""
    centers: list[np.ndarray] = []
    for _ in range(max_tries):
        if len(centers) == n_blobs:
            break
        c = rng.uniform(0.0, box, size=2)
        if all(np.linalg.norm(c - o) >= min_sep for o in centers):
            centers.append(c)
    if len(centers) < n_blobs:
        raise ValueError(f"could not place {n_blobs} centers {min_sep} apart in a box of {box}")
    return np.array(centers)


def gaussian_blobs(
    n_blobs: int,
    per_blob: int,
    sigma: float,
    box: float,
    rng: RngStream,
    min_sep: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic 2D blobs. Returns ``(points, labels)``.

    Centers default to at least ``20 * sigma`` apart.
    """
    if sigma < 0 or not np.isfinite(sigma):
        raise ValueError("sigma must be finite and >= 0")
    if box <= 0 or not np.isfinite(box):
        raise ValueError("box must be positive")
    if n_blobs < 1 or per_blob < 1:
        raise ValueError("blob count and size must be positive")
    if min_sep is None:
        min_sep = 20.0 * sigma
    centers = blob_centers(n_blobs, box, min_sep, rng)
    pts = np.repeat(centers, per_blob, axis=0)
    if sigma > 0:
        pts = pts + rng.normal(0.0, sigma, size=pts.shape)
    labels = np.repeat(np.arange(n_blobs), per_blob)
    return pts, labels


def uniform_field(n: int, box: float, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    if box <= 0 or not np.isfinite(box):
        raise ValueError("box must be positive")
    if n < 2:
        raise ValueError("need at least 2 points")
    return rng.uniform(0.0, box, size=(n, 2)), np.zeros(n, dtype=int)


def corridor_field(
    n_corridors: int,
    per_corridor: int,
    length: float,
    width: float,
    gap: float,
    rng: RngStream,
) -> tuple[np.ndarray, np.ndarray]:
    """Parallel horizontal strips ``length x width`` separated by ``gap``."""
    if min(length, width, gap) <= 0:
        raise ValueError("corridor length, width and gap must be positive")
    if n_corridors < 1 or per_corridor < 1:
        raise ValueError("corridor count and size must be positive")
    parts = []
    for c in range(n_corridors):
        x = rng.uniform(0.0, length, size=per_corridor)
        y = c * (width + gap) + rng.uniform(0.0, width, size=per_corridor)
        parts.append(np.column_stack([x, y]))
    return np.vstack(parts), np.repeat(np.arange(n_corridors), per_corridor)


def mixed_field(rng: RngStream, sigma: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Two tight blobs beside two corridors, one group label each."""
    blobs, bl = gaussian_blobs(2, 40, sigma, 10.0, rng.derive(0), min_sep=8.0)
    corr, cl = corridor_field(2, 40, 14.0, 1.0, 5.0, rng.derive(1))
    corr = corr + np.array([16.0, 0.0])
    return np.vstack([blobs, corr]), np.concatenate([bl, cl + 2])


def write_points(path: str | Path, points: np.ndarray, labels: np.ndarray | None = None) -> Path | None:
    """Write one point per line; labels (if any) go to ``<path>.labels``."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for row in points:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    if labels is None:
        return None
    label_path = path.with_name(path.name + ".labels")
    label_path.write_text("".join(f"{int(l)}\n" for l in labels), encoding="utf-8")
    return label_path
