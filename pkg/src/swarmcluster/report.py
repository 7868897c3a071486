"""JSON report assembly and SVG rendering.

Reports are plain JSON-native dicts (no tuples, no NaN) so that
``json.loads(dumps(report)) == report``. Wall-clock timings live under the
single top-level key ``"timings"``; everything else is a deterministic
function of the invocation.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from swarmcluster.datamodel import Dataset, Firefly, Partition
from swarmcluster.fitness import FitnessBreakdown
from swarmcluster.geometry import convex_hull
from swarmcluster.tsp import RouteSummary

log = logging.getLogger(__name__)

SCHEMA = "swarmcluster.report/1"

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]


def firefly_dict(f: Firefly) -> list[list[float]]:
    return f.centroids.tolist()


def breakdown_dict(b: FitnessBreakdown) -> dict:
    return {k: float(v) for k, v in b.to_dict().items()}


def hulls_for(part: Partition, data: Dataset) -> list[dict] | None:
    """Per-cluster hulls, or ``None`` (with a warning) when the data is not 2D."""
    if data.dim != 2:
        log.warning("convex hulls are only reported for 2D data (got D=%d)", data.dim)
        return None
    out = []
    for c, members in enumerate(part.clusters):
        if len(members) == 0:
            continue
        hull = convex_hull(data.points[members])
        out.append({"cluster": c, "vertices": hull.vertices.tolist(), "area": hull.area})
    return out


def routes_dict(summary: RouteSummary, method: str) -> dict:
    return {
        "method": method,
        "per_cluster": [
            {"cluster": c, "order": list(r.order), "length": float(r.length)}
            for c, r in enumerate(summary.routes)
        ],
        "total": float(summary.total),
    }


def new_report(command: str, invocation: dict, data: Dataset | None, data_path: str | None) -> dict:
    report = {"schema": SCHEMA, "command": command, "invocation": invocation}
    if data is not None:
        report["dataset"] = {"path": data_path, **data.summary()}
    report["timings"] = {}
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(report: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(report), encoding="utf-8")


def strip_timings(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timings"}


def render_svg(
    data: Dataset,
    labels: Sequence[int] | np.ndarray | None = None,
    centroids: np.ndarray | None = None,
    hulls: list[dict] | None = None,
    routes: dict | None = None,
    size: int = 640,
    margin: int = 24,
) -> str:
    """Static plot of the first two coordinates: points, hulls, routes, centroids."""
    pts = data.points[:, :2] if data.dim >= 2 else np.column_stack([data.points[:, 0], np.zeros(data.n_points)])
    lo = pts.min(axis=0)
    span = np.maximum(pts.max(axis=0) - lo, 1e-12)
    scale = (size - 2 * margin) / span.max()

    def xy(p):
        x = margin + (p[0] - lo[0]) * scale
        y = size - margin - (p[1] - lo[1]) * scale
        return f"{x:.2f},{y:.2f}"

    def color(c):
        return PALETTE[int(c) % len(PALETTE)]

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for h in hulls or []:
        verts = " ".join(xy(v) for v in h["vertices"])
        c = color(h["cluster"])
        out.append(
            f'<polygon class="hull" points="{verts}" fill="{c}" fill-opacity="0.12" '
            f'stroke="{c}" stroke-width="1.5"/>'
        )
    if routes:
        for r in routes["per_cluster"]:
            if len(r["order"]) < 2:
                continue
            loop = list(r["order"]) + [r["order"][0]]
            path = " ".join(xy(pts[i]) for i in loop)
            out.append(
                f'<polyline class="route" points="{path}" fill="none" '
                f'stroke="{color(r["cluster"])}" stroke-width="1" stroke-dasharray="4 2"/>'
            )
    for i, p in enumerate(pts):
        c = color(labels[i]) if labels is not None else "#333333"
        x, y = xy(p).split(",")
        out.append(f'<circle class="point" cx="{x}" cy="{y}" r="2.5" fill="{c}"/>')
    if centroids is not None:
        for p in np.asarray(centroids)[:, :2]:
            x, y = (float(v) for v in xy(p).split(","))
            out.append(
                f'<path class="centroid" d="M{x - 6:.2f},{y:.2f}H{x + 6:.2f}M{x:.2f},{y - 6:.2f}V{y + 6:.2f}" '
                f'stroke="black" stroke-width="2"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
