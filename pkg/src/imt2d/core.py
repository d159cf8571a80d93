"""Irreducible Minkowski tensors of polygonal contours.

The central object is :class:`MinkowskiAccumulator`, a running sum over oriented
boundary segments.  For a segment of length ``L`` whose outward normal points at
angle ``phi`` it accumulates ``L * exp(1j * s * phi)`` into the coefficient
``psi[s]`` for every order ``s`` up to ``s_max``, plus the segment length into the
perimeter and a shoelace term into the signed area.

Orientation convention: contours are traversed counterclockwise, interior on the
left of each segment, and the outward normal is the segment direction rotated by
-90 degrees.  Magnitudes ``q_s = |psi_s| / perimeter`` do not depend on this
convention; the phases (and hence preferred directions) do, which is why it is
pinned here.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    DegenerateGeometryError,
    InvalidInputError,
    NoDirectionError,
    OrientationError,
    UndefinedMetricError,
)

DEFAULT_S_MAX = 12

#: Segments shorter than this are silently skipped everywhere.
MIN_SEGMENT_LENGTH = 1e-14


class MinkowskiAccumulator:
    """Running sums of area, perimeter, and complex coefficients psi_s.

    Accumulators are plain values: no shared state, safe to build concurrently on
    independent inputs and combine with :func:`merge`.
    """

    __slots__ = ("_area", "_perimeter", "_psi")

    def __init__(self, s_max: int = DEFAULT_S_MAX):
        if s_max < 2:
            raise InvalidInputError(f"s_max must be >= 2, got {s_max}")
        self._area = 0.0
        self._perimeter = 0.0
        self._psi = np.zeros(int(s_max) + 1, dtype=np.complex128)

    @property
    def s_max(self) -> int:
        return len(self._psi) - 1

    @property
    def psi(self) -> np.ndarray:
        """Coefficients psi_0..psi_smax.  psi_0 equals the perimeter exactly."""
        return self._psi

    def area(self) -> float:
        """Signed area enclosed by the accumulated contours.

        Meaningful only once every contour fed in is closed; for open segment
        collections the value is an origin-dependent shoelace sum.
        """
        return self._area

    def perimeter(self) -> float:
        """Total accumulated boundary length."""
        return self._perimeter

    def imt(self, s: int) -> complex:
        """The s-th irreducible Minkowski tensor psi_s."""
        s = int(s)
        if not 0 <= s <= self.s_max:
            raise IndexError(f"s={s} outside 0..{self.s_max}")
        return complex(self._psi[s])

    def msm(self, s: int) -> float:
        """The s-th Minkowski structure metric q_s = |psi_s| / perimeter, in [0, 1]."""
        if self._perimeter <= 0.0:
            raise UndefinedMetricError("q_s is undefined for an empty accumulator")
        q = abs(self.imt(s)) / self._perimeter
        return min(q, 1.0)

    def preferred_direction(self, s: int) -> float:
        """Distinguished axis arg(psi_s)/s, reduced into [0, 2*pi/s).

        Covariant under rotation: rotating the input by theta shifts the result
        by theta modulo 2*pi/s.
        """
        s = int(s)
        if s < 1:
            raise InvalidInputError("preferred_direction requires s >= 1")
        z = self.imt(s)
        if abs(z) <= 1e-12 * self._perimeter:
            raise NoDirectionError(f"|psi_{s}| vanishes; no distinguished direction")
        return (math.atan2(z.imag, z.real) / s) % (2.0 * math.pi / s)

    def add_segment(self, p0, p1) -> None:
        """Accumulate one oriented segment p0 -> p1 (interior on the left).

        Adds the length to the perimeter, L*exp(1j*s*phi) to each psi_s with phi
        the outward normal angle, and the shoelace term (x0*y1 - x1*y0)/2 to the
        area.  Segments shorter than 1e-14 are skipped.
        """
        x0, y0 = float(p0[0]), float(p0[1])
        x1, y1 = float(p1[0]), float(p1[1])
        if not (math.isfinite(x0) and math.isfinite(y0) and math.isfinite(x1) and math.isfinite(y1)):
            raise InvalidInputError("segment endpoints must be finite")
        dx = x1 - x0
        dy = y1 - y0
        length = math.hypot(dx, dy)
        if length < MIN_SEGMENT_LENGTH:
            return
        # Outward normal for interior-left orientation: direction rotated -90deg.
        phi = math.atan2(-dx, dy)
        self._perimeter += length
        s = np.arange(len(self._psi))
        self._psi += length * np.exp(1j * s * phi)
        # Guard the exact psi_0 == perimeter identity against exp() rounding.
        self._psi[0] = complex(self._perimeter)
        self._area += 0.5 * (x0 * y1 - x1 * y0)

    def add_segments(self, p0s, p1s) -> None:
        """Vectorized :meth:`add_segment` over arrays of shape (n, 2)."""
        p0s = np.asarray(p0s, dtype=np.float64).reshape(-1, 2)
        p1s = np.asarray(p1s, dtype=np.float64).reshape(-1, 2)
        if p0s.shape != p1s.shape:
            raise InvalidInputError("p0s and p1s must have matching shapes")
        if not (np.isfinite(p0s).all() and np.isfinite(p1s).all()):
            raise InvalidInputError("segment endpoints must be finite")
        d = p1s - p0s
        lengths = np.hypot(d[:, 0], d[:, 1])
        keep = lengths >= MIN_SEGMENT_LENGTH
        cross = p0s[:, 0] * p1s[:, 1] - p1s[:, 0] * p0s[:, 1]
        self._area += 0.5 * float(cross[keep].sum())
        self._accumulate_boundary(lengths[keep], np.arctan2(-d[keep, 0], d[keep, 1]))

    def _accumulate_boundary(self, lengths: np.ndarray, normal_angles: np.ndarray) -> None:
        """Add segment lengths and normal angles to perimeter and psi only."""
        if lengths.size == 0:
            return
        total = float(lengths.sum())
        s = np.arange(1, len(self._psi))
        self._psi[1:] += (lengths[None, :] * np.exp(1j * np.outer(s, normal_angles))).sum(axis=1)
        self._perimeter += total
        self._psi[0] += total

    def _add_area(self, amount: float) -> None:
        self._area += float(amount)

    def __repr__(self) -> str:
        return (
            f"MinkowskiAccumulator(area={self._area:.6g}, perimeter={self._perimeter:.6g}, "
            f"s_max={self.s_max})"
        )


def merge(a: MinkowskiAccumulator, b: MinkowskiAccumulator) -> MinkowskiAccumulator:
    """Fieldwise sum of two accumulators; associative and commutative."""
    if a.s_max != b.s_max:
        raise InvalidInputError(f"s_max mismatch: {a.s_max} != {b.s_max}")
    out = MinkowskiAccumulator(a.s_max)
    out._area = a._area + b._area
    out._perimeter = a._perimeter + b._perimeter
    out._psi = a._psi + b._psi
    return out


def polygon_signed_area(vertices) -> float:
    """Shoelace area of an implicitly closed vertex list; positive for CCW."""
    v = np.asarray(vertices, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2:
        raise InvalidInputError("vertices must be an (n, 2) array")
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _drop_duplicate_vertices(v: np.ndarray) -> np.ndarray:
    keep = np.hypot(*(v - np.roll(v, 1, axis=0)).T) >= MIN_SEGMENT_LENGTH
    if keep.all():
        return v
    return v[keep]


def is_simple_polygon(vertices) -> bool:
    """True if no two non-adjacent edges intersect or touch.  O(n^2)."""
    v = _drop_duplicate_vertices(np.asarray(vertices, dtype=np.float64))
    n = len(v)
    if n < 3:
        return False
    p = v
    q = np.roll(v, -1, axis=0)

    def orient(a, b, c):
        d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        scale = max(abs(b[0] - a[0]) + abs(b[1] - a[1]), abs(c[0] - a[0]) + abs(c[1] - a[1]), 1.0)
        if abs(d) <= 1e-14 * scale * scale:
            return 0
        return 1 if d > 0 else -1

    def on_segment(a, b, c):
        return (
            min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14
            and min(a[1], b[1]) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14
        )

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            a, b, c, d = p[i], q[i], p[j], q[j]
            o1, o2 = orient(a, b, c), orient(a, b, d)
            o3, o4 = orient(c, d, a), orient(c, d, b)
            if o1 != o2 and o3 != o4:
                return False
            if o1 == 0 and on_segment(a, b, c):
                return False
            if o2 == 0 and on_segment(a, b, d):
                return False
            if o3 == 0 and on_segment(c, d, a):
                return False
            if o4 == 0 and on_segment(c, d, b):
                return False
    return True


def validate_polygon(vertices, check_simple: bool = False) -> np.ndarray:
    """Validate a CCW simple polygon and return its cleaned (n, 2) vertex array.

    Duplicate consecutive vertices (closing repeats included) are dropped.
    Raises OrientationError for clockwise input and DegenerateGeometryError for
    zero signed area.  The O(n^2) simplicity check only runs when requested.
    """
    v = np.asarray(vertices, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2:
        raise InvalidInputError("vertices must be an (n, 2) array")
    if not np.isfinite(v).all():
        raise InvalidInputError("polygon vertices must be finite")
    v = _drop_duplicate_vertices(v)
    if len(v) < 3:
        raise InvalidInputError(f"polygon needs at least 3 distinct vertices, got {len(v)}")
    area = polygon_signed_area(v)
    scale = float(np.abs(v).max()) or 1.0
    if abs(area) <= 1e-14 * scale * scale:
        raise DegenerateGeometryError("polygon has zero signed area")
    if area < 0.0:
        raise OrientationError("polygon vertices are ordered clockwise; expected counterclockwise")
    if check_simple and not is_simple_polygon(v):
        raise InvalidInputError("polygon is self-intersecting")
    return v


def imt_polygon(vertices, s_max: int = DEFAULT_S_MAX, check_simple: bool = False) -> MinkowskiAccumulator:
    """Irreducible Minkowski tensors of a closed simple CCW polygon.

    Equivalent to folding :meth:`MinkowskiAccumulator.add_segment` over the edge
    list; the accumulated area equals the polygon's (positive) signed area.
    """
    v = validate_polygon(vertices, check_simple=check_simple)
    acc = MinkowskiAccumulator(s_max)
    acc.add_segments(v, np.roll(v, -1, axis=0))
    return acc
