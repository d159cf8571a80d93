"""Voronoi tessellation of point patterns and per-cell Minkowski metrics.

Cells are built generator by generator through sequential half-plane clipping:
start from a convex seed polygon (the observation box, or the fundamental
domain around the generator in periodic mode) and cut with the perpendicular
bisector towards neighbors in order of increasing distance.  Clipping stops
once the next candidate is more than twice as far as the farthest current cell
vertex, which provably cannot cut the cell any further.  This keeps the cell
geometry exact regardless of any triangulation round-off and handles collinear
generators (where no triangulation exists) without special cases.

Boundary policies:

* ``clip`` (default): cells are intersected with the box; cells touching the
  box boundary are flagged ``is_border``.
* ``exclude-border``: same geometry, but border cells are dropped from
  :func:`analyze_point_pattern` results.
* ``periodic``: the pattern is virtually tiled 3x3; every cell is a true
  torus cell (never truncated by the window), so ``is_border`` is always False.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_S_MAX, MinkowskiAccumulator, imt_polygon
from .errors import EmptySelectionError, InvalidInputError

BOUNDARY_POLICIES = ("clip", "exclude-border", "periodic")
BORDER_TOUCH_RTOL = 1e-9


@dataclass
class PointSet:
    """Planar generators plus the axis-aligned observation window."""

    points: np.ndarray
    box: tuple[float, float, float, float]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInputError("points must be an (n, 2) array")
        if pts.shape[0] == 0:
            raise InvalidInputError("point set is empty")
        if not np.isfinite(pts).all():
            raise InvalidInputError("points must be finite")
        xmin, ymin, xmax, ymax = (float(v) for v in self.box)
        if not all(map(math.isfinite, (xmin, ymin, xmax, ymax))) or xmin >= xmax or ymin >= ymax:
            raise InvalidInputError("box must be (xmin, ymin, xmax, ymax) with positive extent")
        diag = math.hypot(xmax - xmin, ymax - ymin)
        eps = 1e-12 * diag
        if (
            (pts[:, 0] < xmin - eps).any()
            or (pts[:, 0] > xmax + eps).any()
            or (pts[:, 1] < ymin - eps).any()
            or (pts[:, 1] > ymax + eps).any()
        ):
            raise InvalidInputError("all points must lie inside or on the box")
        # Pairwise distinctness at 1e-10 of the box diagonal, via sorted sweep.
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        min_sep = 1e-10 * diag
        s = pts[order]
        close = np.nonzero(np.hypot(*(s[1:] - s[:-1]).T) <= min_sep)[0]
        if close.size:
            i, j = int(order[close[0]]), int(order[close[0] + 1])
            raise InvalidInputError(f"points {min(i, j)} and {max(i, j)} closer than 1e-10 of the box diagonal")
        self.points = pts
        self.box = (xmin, ymin, xmax, ymax)

    @property
    def size(self) -> int:
        return self.points.shape[0]


@dataclass
class VoronoiCellResult:
    generator: np.ndarray
    cell: np.ndarray
    metrics: MinkowskiAccumulator
    is_border: bool


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray


def _clip_halfplane(poly, g, c):
    """Intersect a convex CCW polygon with {x : |x - g| <= |x - c|}."""
    normal = c - g
    offset = normal @ (0.5 * (g + c))
    f = poly @ normal - offset
    if (f <= 0.0).all():
        return poly
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        fi, fj = f[i], f[j]
        if fi <= 0.0:
            out.append(poly[i])
            if fj > 0.0:
                out.append(poly[i] + (poly[j] - poly[i]) * (fi / (fi - fj)))
        elif fj <= 0.0:
            out.append(poly[i] + (poly[j] - poly[i]) * (fi / (fi - fj)))
    return np.array(out)


def _carve_cell(g, seed_poly, candidates, d2):
    """Clip the seed polygon against bisectors in order of increasing distance.

    Sound early exit: a generator at distance d > 2 * max|v - g| has its
    bisector strictly outside the current cell, so no later candidate (sorted
    by d) can change anything.
    """
    poly = seed_poly
    order = np.argsort(d2, kind="stable")
    r2 = ((poly - g) ** 2).sum(axis=1).max()
    for idx in order:
        if d2[idx] > 4.0 * r2:
            break
        clipped = _clip_halfplane(poly, g, candidates[idx])
        if clipped is not poly:
            poly = clipped
            r2 = ((poly - g) ** 2).sum(axis=1).max()
    return poly


def _as_pointset(points, box) -> PointSet:
    if isinstance(points, PointSet):
        return points
    if box is None:
        raise InvalidInputError("box is required when points are given as a raw array")
    return PointSet(np.asarray(points, dtype=np.float64), tuple(box))


def voronoi_cells(points, box=None, policy: str = "clip", s_max: int = DEFAULT_S_MAX):
    """Voronoi cell polygon + metrics for every generator, in input order.

    Accepts a PointSet, or a raw (n, 2) array together with ``box``.  Under
    ``exclude-border`` the full marked list is returned; dropping flagged cells
    is the caller's (or analyze_point_pattern's) choice.
    """
    ps = _as_pointset(points, box)
    if policy not in BOUNDARY_POLICIES:
        raise InvalidInputError(f"unknown boundary policy {policy!r}; choose from {BOUNDARY_POLICIES}")
    if ps.size < 3:
        raise InvalidInputError("tessellation requires at least 3 points")
    pts = ps.points
    xmin, ymin, xmax, ymax = ps.box
    w, h = xmax - xmin, ymax - ymin
    tol = BORDER_TOUCH_RTOL * math.hypot(w, h)

    if policy == "periodic":
        inner = (
            (pts[:, 0] > xmin + tol)
            & (pts[:, 0] < xmax - tol)
            & (pts[:, 1] > ymin + tol)
            & (pts[:, 1] < ymax - tol)
        )
        if not inner.all():
            raise InvalidInputError("periodic boundary requires all points strictly inside the box")
        shifts = np.array([(dx, dy) for dy in (-h, 0.0, h) for dx in (-w, 0.0, w)])
        tiled = (pts[None, :, :] + shifts[:, None, :]).reshape(-1, 2)

    results = []
    for i in range(ps.size):
        g = pts[i]
        if policy == "periodic":
            cand = tiled
            seed = np.array(
                [
                    [g[0] - w / 2.0, g[1] - h / 2.0],
                    [g[0] + w / 2.0, g[1] - h / 2.0],
                    [g[0] + w / 2.0, g[1] + h / 2.0],
                    [g[0] - w / 2.0, g[1] + h / 2.0],
                ]
            )
        else:
            cand = pts
            seed = np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]])
        d2 = ((cand - g) ** 2).sum(axis=1)
        d2[d2 == 0.0] = np.inf  # the generator itself (and periodic self-copy handling)
        cell = _carve_cell(g, seed, cand, d2)

        if policy == "periodic":
            is_border = False
        else:
            is_border = bool(
                (np.abs(cell[:, 0] - xmin) <= tol).any()
                or (np.abs(cell[:, 0] - xmax) <= tol).any()
                or (np.abs(cell[:, 1] - ymin) <= tol).any()
                or (np.abs(cell[:, 1] - ymax) <= tol).any()
            )
        results.append(
            VoronoiCellResult(
                generator=g.copy(),
                cell=cell,
                metrics=imt_polygon(cell, s_max=s_max),
                is_border=is_border,
            )
        )
    return results


def analyze_point_pattern(points, box=None, policy: str = "clip", s_max: int = DEFAULT_S_MAX):
    """Per-cell Minkowski metrics of a point pattern.

    With ``exclude-border`` the flagged cells are removed from the result so
    downstream statistics see only window-independent cells.
    """
    results = voronoi_cells(points, box, policy=policy, s_max=s_max)
    if policy == "exclude-border":
        return [r for r in results if not r.is_border]
    return results


def q_histogram(results, s: int, bins: int, include_border: bool = False) -> Histogram:
    """Histogram of q_s over cells, on [0, 1] with equal-width bins.

    Border cells are skipped unless ``include_border``; the top bin is closed
    so q_s = 1 lands inside it.
    """
    if bins < 1:
        raise InvalidInputError("bins must be >= 1")
    values = [r.metrics.msm(s) for r in results if include_border or not r.is_border]
    if not values:
        raise EmptySelectionError("no cells selected for histogram")
    counts, edges = np.histogram(np.array(values), bins=bins, range=(0.0, 1.0))
    return Histogram(bin_edges=edges, counts=counts)
