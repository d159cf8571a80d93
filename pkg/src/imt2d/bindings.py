"""JSON analysis boundary for UI frontends.

One entry point, :func:`analyze_request`, maps a plain-dict request to a
plain-dict result so any transport (HTTP dev server, pipe, embedded runtime)
can expose the same math without reimplementing it.

Request shape::

    {"mode": "polygon", "payload": {"vertices": [[x, y], ...]}, "s_max": 8}
    {"mode": "points",  "payload": {"points": [[x, y], ...],
                                    "box": [xmin, ymin, xmax, ymax] | null,
                                    "boundary": "clip" | "exclude-border" | "periodic"},
                        "s_max": 8}
    {"mode": "image",   "payload": {"width": W, "height": H,
                                    "values": [row-major floats in [0, 1]],
                                    "threshold": t, "close_border": bool},
                        "s_max": 8}

Result shape::

    {"area": float, "perimeter": float,
     "q": [{"s": s, "magnitude": m, "direction": d | null}, ...],
     "per_cell": [{"cell": [[x, y], ...], "q": [...same shape...]}, ...]}

``per_cell`` is present exactly for points mode.  Payload limits mirror the
interactive tool's promise (1000 points / 500x500 pixels) and are enforced
here as well as client-side.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_S_MAX, imt_polygon, merge, polygon_signed_area
from .errors import InvalidInputError, NoDirectionError, UndefinedMetricError
from .marching import GreyscaleImage, MarchingSquaresConfig, imt_interpolated_marching_squares
from .voronoi import BOUNDARY_POLICIES, PointSet, analyze_point_pattern

MAX_POINTS = 1000
MAX_VERTICES = 1000
MAX_PIXELS_PER_SIDE = 500


def _q_list(acc, s_max):
    out = []
    for s in range(2, s_max + 1):
        try:
            mag = acc.msm(s)
        except UndefinedMetricError:
            out.append({"s": s, "magnitude": None, "direction": None})
            continue
        try:
            direction = acc.preferred_direction(s)
        except NoDirectionError:
            direction = None
        out.append({"s": s, "magnitude": mag, "direction": direction})
    return out


def _require(payload, key, kind=None):
    if key not in payload:
        raise InvalidInputError(f"payload is missing {key!r}")
    value = payload[key]
    if kind is not None and not isinstance(value, kind):
        raise InvalidInputError(f"payload field {key!r} has the wrong type")
    return value


def _coords(raw, what, limit):
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError(f"{what} must be a list of [x, y] pairs")
    if arr.shape[0] > limit:
        raise InvalidInputError(f"at most {limit} {what} are supported, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise InvalidInputError(f"{what} must be finite")
    return arr


def analyze_request(request: dict) -> dict:
    """Run one analysis described by a JSON-shaped dict."""
    if not isinstance(request, dict):
        raise InvalidInputError("request must be a JSON object")
    mode = request.get("mode")
    payload = request.get("payload")
    if not isinstance(payload, dict):
        raise InvalidInputError("request needs a payload object")
    s_max = request.get("s_max", 8)
    if not isinstance(s_max, int) or isinstance(s_max, bool) or not (2 <= s_max <= 36):
        raise InvalidInputError("s_max must be an integer in 2..36")

    if mode == "polygon":
        vertices = _coords(_require(payload, "vertices"), "vertices", MAX_VERTICES)
        if len(vertices) >= 3 and polygon_signed_area(vertices) < 0.0:
            vertices = vertices[::-1]
        acc = imt_polygon(vertices, s_max=s_max)
        return {"area": acc.area(), "perimeter": acc.perimeter(), "q": _q_list(acc, s_max)}

    if mode == "image":
        width = _require(payload, "width", int)
        height = _require(payload, "height", int)
        if width > MAX_PIXELS_PER_SIDE or height > MAX_PIXELS_PER_SIDE:
            raise InvalidInputError(
                f"images larger than {MAX_PIXELS_PER_SIDE}x{MAX_PIXELS_PER_SIDE} are not supported"
            )
        values = _require(payload, "values")
        threshold = _require(payload, "threshold", (int, float))
        image = GreyscaleImage.from_flat(values, width=width, height=height)
        cfg = MarchingSquaresConfig(
            float(threshold),
            s_max=s_max,
            close_border=bool(payload.get("close_border", False)),
        )
        acc = imt_interpolated_marching_squares(image, cfg)
        return {"area": acc.area(), "perimeter": acc.perimeter(), "q": _q_list(acc, s_max)}

    if mode == "points":
        pts = _coords(_require(payload, "points"), "points", MAX_POINTS)
        box = payload.get("box")
        if box is None:
            pad_x = max(1e-9, 1e-3 * (float(np.ptp(pts[:, 0])) or 1.0))
            pad_y = max(1e-9, 1e-3 * (float(np.ptp(pts[:, 1])) or 1.0))
            box = (
                float(pts[:, 0].min()) - pad_x,
                float(pts[:, 1].min()) - pad_y,
                float(pts[:, 0].max()) + pad_x,
                float(pts[:, 1].max()) + pad_y,
            )
        else:
            box = tuple(float(v) for v in box)
            if len(box) != 4:
                raise InvalidInputError("box must be [xmin, ymin, xmax, ymax]")
        boundary = payload.get("boundary", "clip")
        if boundary not in BOUNDARY_POLICIES:
            raise InvalidInputError(f"unknown boundary policy {boundary!r}")
        results = analyze_point_pattern(PointSet(pts, box), policy=boundary, s_max=s_max)
        if not results:
            raise InvalidInputError("no cells remain after border exclusion")
        total = results[0].metrics
        for r in results[1:]:
            total = merge(total, r.metrics)
        return {
            "area": total.area(),
            "perimeter": total.perimeter(),
            "q": _q_list(total, s_max),
            "per_cell": [
                {"cell": r.cell.tolist(), "q": _q_list(r.metrics, s_max)} for r in results
            ],
        }

    raise InvalidInputError(f"unknown mode {mode!r}; expected polygon, points, or image")
