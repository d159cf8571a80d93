"""File ingest and result serialization.

Text formats are deliberately plain: one "x y" pair per line (whitespace or
comma separated), `#` starts a comment, and an optional `# box xmin ymin xmax
ymax` header pins the observation window for point sets.  Without a header the
window is the tight bounding box expanded by 1e-9 on each side.

CSV output uses the fixed header ``label,threshold,area,perimeter,q2,arg2,...``
with 12 significant digits, so identical inputs always produce byte-identical
files.  Degenerate directions (no well-defined arg) serialize as empty fields.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import polygon_signed_area, validate_polygon
from .errors import InvalidInputError, NoDirectionError, ParseError, UndefinedMetricError
from .marching import GreyscaleImage
from .png import decode_png
from .voronoi import PointSet

CHANNEL_SELECTORS = ("luma", "red", "green", "blue", "alpha")
_LUMA = (0.2126, 0.7152, 0.0722)


def load_image(path, channel: str = "luma", pixel_spacing: float = 1.0) -> GreyscaleImage:
    """Decode a PNG file to one analysis channel with values in [0, 1].

    Greyscale sources ignore the red/green/blue distinction (there is only one
    channel); requesting alpha from an image without an alpha channel is an
    error rather than a silent constant.
    """
    if channel not in CHANNEL_SELECTORS:
        raise InvalidInputError(f"unknown channel {channel!r}; choose from {CHANNEL_SELECTORS}")
    with open(path, "rb") as fh:
        img = decode_png(fh.read())
    s = img.samples
    grey = img.color_type in (0, 4)
    has_alpha = img.color_type in (4, 6)
    if channel == "alpha":
        if not has_alpha:
            raise InvalidInputError("image has no alpha channel")
        values = s[:, :, -1]
    elif grey:
        values = s[:, :, 0]
    elif channel == "luma":
        values = _LUMA[0] * s[:, :, 0] + _LUMA[1] * s[:, :, 1] + _LUMA[2] * s[:, :, 2]
    else:
        values = s[:, :, ("red", "green", "blue").index(channel)]
    return GreyscaleImage(np.ascontiguousarray(values), pixel_spacing)


def _parse_rows(path):
    """(x, y) rows plus the first `# box ...` header found, if any."""
    rows = []
    box = None
    with open(path, "r", encoding="utf-8") as fh:
        for n, rawline in enumerate(fh, start=1):
            line = rawline.strip()
            if line.startswith("#"):
                fields = line[1:].split()
                if fields[:1] == ["box"]:
                    if len(fields) != 5:
                        raise ParseError("box header needs 4 numbers: xmin ymin xmax ymax", line=n)
                    try:
                        header = tuple(float(v) for v in fields[1:])
                    except ValueError:
                        raise ParseError("unreadable box header", line=n) from None
                    if box is None:
                        box = header
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.replace(",", " ").split()
            if len(tokens) != 2:
                raise ParseError(f"expected 2 values, got {len(tokens)}", line=n)
            try:
                x, y = float(tokens[0]), float(tokens[1])
            except ValueError:
                raise ParseError(f"unreadable coordinates {' '.join(tokens)!r}", line=n) from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError("coordinates must be finite", line=n)
            rows.append((x, y))
    return rows, box


def read_points(path) -> PointSet:
    """Parse an x/y point file into a PointSet with its observation window."""
    rows, box = _parse_rows(path)
    if not rows:
        raise InvalidInputError(f"{path}: no points found")
    pts = np.array(rows, dtype=np.float64)
    if box is None:
        pad = 1e-9
        box = (
            float(pts[:, 0].min()) - pad,
            float(pts[:, 1].min()) - pad,
            float(pts[:, 0].max()) + pad,
            float(pts[:, 1].max()) + pad,
        )
    return PointSet(pts, box)


def read_polygon(path, auto_orient: bool = True) -> np.ndarray:
    """Parse a vertex file into a validated CCW polygon.

    Clockwise input is reversed (with a warning) when auto_orient is set;
    otherwise it is rejected like any other orientation violation.
    """
    rows, _ = _parse_rows(path)
    if len(rows) < 3:
        raise InvalidInputError(f"{path}: a polygon needs at least 3 vertices, got {len(rows)}")
    vertices = np.array(rows, dtype=np.float64)
    if auto_orient and polygon_signed_area(vertices) < 0.0:
        warnings.warn(f"{path}: clockwise vertex order; reversing", stacklevel=2)
        vertices = vertices[::-1]
    return validate_polygon(vertices)


@dataclass
class ResultRow:
    """One CSV output row; q holds (s, magnitude, direction-or-None) triples."""

    label: str
    threshold: float | None
    area: float
    perimeter: float
    q: list


def _fmt(value) -> str:
    if value is None:
        return ""
    v = float(value)
    if math.isnan(v):
        return ""
    return f"{v:.12g}"


def format_results(rows, s_max: int | None = None) -> str:
    """Render rows to CSV text (exposed separately so the CLI can write atomically)."""
    if s_max is None:
        s_max = max((row.q[-1][0] for row in rows if row.q), default=12)
    header = ["label", "threshold", "area", "perimeter"]
    for s in range(2, s_max + 1):
        header += [f"q{s}", f"arg{s}"]
    lines = [",".join(header)]
    for row in rows:
        by_s = {s: (mag, direction) for s, mag, direction in row.q}
        cells = [row.label, _fmt(row.threshold), _fmt(row.area), _fmt(row.perimeter)]
        for s in range(2, s_max + 1):
            if s not in by_s:
                raise InvalidInputError(f"row {row.label!r} is missing q{s}")
            mag, direction = by_s[s]
            cells += [_fmt(mag), _fmt(direction)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_results(rows, path, s_max: int | None = None) -> None:
    text = format_results(rows, s_max=s_max)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def format_cell_results(results, s_max: int) -> str:
    """Per-Voronoi-cell CSV: generator position, metrics, border flag.

    Header: ``x,y,area,perimeter,q2,arg2,...,qS,argS,is_border`` with is_border
    serialized as 0/1.  Rows keep the input generator order.
    """
    header = ["x", "y", "area", "perimeter"]
    for s in range(2, s_max + 1):
        header += [f"q{s}", f"arg{s}"]
    header.append("is_border")
    lines = [",".join(header)]
    for r in results:
        cells = [_fmt(r.generator[0]), _fmt(r.generator[1]), _fmt(r.metrics.area()), _fmt(r.metrics.perimeter())]
        for s in range(2, s_max + 1):
            try:
                mag = r.metrics.msm(s)
            except UndefinedMetricError:
                cells += ["", ""]
                continue
            try:
                direction = r.metrics.preferred_direction(s)
            except NoDirectionError:
                direction = None
            cells += [_fmt(mag), _fmt(direction)]
        cells.append("1" if r.is_border else "0")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
