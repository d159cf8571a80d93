"""Incremental Delaunay triangulation (Bowyer-Watson).

Deterministic by construction: points are inserted in input order, and the
in-circle predicate uses a fixed tolerance of 1e-12 relative to the local
scale (the larger of circumradius^2 and the squared query distance).  Decisions
that fall inside the tolerance band are taken as "inside" and reported via
``Triangulation.had_ties`` instead of being silently swallowed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidInputError

INCIRCLE_RTOL = 1e-12


@dataclass
class Triangulation:
    """Result of :func:`delaunay`: vertex indices of each triangle, CCW."""

    points: np.ndarray
    triangles: np.ndarray
    had_ties: bool


def _validate_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidInputError("points must be an (n, 2) array")
    if pts.shape[0] < 3:
        raise InvalidInputError("triangulation requires at least 3 points")
    if not np.isfinite(pts).all():
        raise InvalidInputError("points must be finite")
    span = float(max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1]), 1e-30))
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    gaps = np.abs(np.diff(pts[order], axis=0)).sum(axis=1)
    dup = np.nonzero(gaps <= 1e-12 * span)[0]
    if dup.size:
        i, j = int(order[dup[0]]), int(order[dup[0] + 1])
        raise InvalidInputError(f"duplicate points at indices {min(i, j)} and {max(i, j)}")
    return pts


def _circumcircles(pts, tris):
    """Circumcenters and squared radii for an (m, 3) index array."""
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    d = 2.0 * ((a[:, 0] - c[:, 0]) * (b[:, 1] - c[:, 1]) - (b[:, 0] - c[:, 0]) * (a[:, 1] - c[:, 1]))
    a2 = ((a - c) ** 2).sum(axis=1)
    b2 = ((b - c) ** 2).sum(axis=1)
    ux = c[:, 0] + ((b[:, 1] - c[:, 1]) * a2 - (a[:, 1] - c[:, 1]) * b2) / d
    uy = c[:, 1] + ((a[:, 0] - c[:, 0]) * b2 - (b[:, 0] - c[:, 0]) * a2) / d
    cc = np.column_stack([ux, uy])
    r2 = ((pts[tris[:, 0]] - cc) ** 2).sum(axis=1)
    return cc, r2


def delaunay(points) -> Triangulation:
    """Delaunay triangulation of >= 3 distinct, non-collinear points.

    Raises DegenerateGeometryError when all points are collinear.  Co-circular
    configurations are triangulated deterministically (insertion order decides
    the diagonal) with ``had_ties`` set.
    """
    pts = _validate_points(points)
    n = pts.shape[0]

    # Degeneracy screen: triangle areas against the first well-separated pair.
    rel = pts - pts[0]
    span = float(max(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    ref = None
    for i in range(1, n):
        if np.hypot(*rel[i]) > 1e-12 * span:
            ref = rel[i]
            break
    area2 = np.abs(ref[0] * rel[:, 1] - ref[1] * rel[:, 0])
    if np.all(area2 <= 1e-12 * span * span):
        raise DegenerateGeometryError("all points are collinear; no triangulation exists")

    # Super-triangle comfortably containing every input point.
    cx, cy = pts.mean(axis=0)
    m = 32.0 * span + 1.0
    work = np.vstack([pts, [[cx - m, cy - m], [cx + m, cy - m], [cx, cy + m]]])
    sv = (n, n + 1, n + 2)

    tris = [list(sv)]
    cc, r2 = _circumcircles(work, np.array(tris))
    ccs = [cc[0]]
    r2s = [r2[0]]
    alive = [True]
    had_ties = False

    for p_idx in range(n):
        p = work[p_idx]
        cc_arr = np.array(ccs)
        r2_arr = np.array(r2s)
        alive_arr = np.array(alive)
        d2 = ((cc_arr - p) ** 2).sum(axis=1)
        scale = np.maximum(r2_arr, d2)
        diff = d2 - r2_arr
        bad = alive_arr & (diff <= INCIRCLE_RTOL * scale)
        if (alive_arr & (np.abs(diff) <= INCIRCLE_RTOL * scale)).any():
            had_ties = True

        # Cavity boundary: edges used by exactly one bad triangle.
        edge_count: dict[tuple[int, int], tuple[int, int]] = {}
        for ti in np.nonzero(bad)[0]:
            i, j, k = tris[ti]
            for u, v in ((i, j), (j, k), (k, i)):
                key = (u, v) if u < v else (v, u)
                if key in edge_count:
                    del edge_count[key]
                else:
                    edge_count[key] = (u, v)
            alive[ti] = False

        for u, v in edge_count.values():
            a, b, c = work[p_idx], work[u], work[v]
            orient = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
            if orient == 0.0:
                continue
            tri = [p_idx, u, v] if orient > 0.0 else [p_idx, v, u]
            tris.append(tri)
            cc, r2 = _circumcircles(work, np.array([tri]))
            ccs.append(cc[0])
            r2s.append(r2[0])
            alive.append(True)

    keep = [
        t
        for t, ok in zip(tris, alive)
        if ok and not (t[0] >= n or t[1] >= n or t[2] >= n)
    ]
    return Triangulation(points=pts, triangles=np.array(keep, dtype=np.intp).reshape(-1, 3), had_ties=had_ties)
