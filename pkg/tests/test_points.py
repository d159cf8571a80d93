"""Delaunay/Voronoi construction and per-cell metrics."""

import math

import numpy as np
import pytest

from imt2d import errors
from imt2d.delaunay import Triangulation, delaunay
from imt2d.voronoi import (
    Histogram,
    PointSet,
    analyze_point_pattern,
    q_histogram,
    voronoi_cells,
)

from conftest import square_lattice, triangular_lattice


def convex_hull(pts):
    """Andrew monotone chain; returns hull vertices CCW."""
    pts = sorted(map(tuple, pts))

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return np.array(lower[:-1] + upper[:-1])


def circumcircle(a, b, c):
    d = 2.0 * ((a[0] - c[0]) * (b[1] - c[1]) - (b[0] - c[0]) * (a[1] - c[1]))
    a2 = (a[0] - c[0]) ** 2 + (a[1] - c[1]) ** 2
    b2 = (b[0] - c[0]) ** 2 + (b[1] - c[1]) ** 2
    ux = c[0] + ((b[1] - c[1]) * a2 - (a[1] - c[1]) * b2) / d
    uy = c[1] + ((a[0] - c[0]) * b2 - (b[0] - c[0]) * a2) / d
    return (ux, uy), (a[0] - ux) ** 2 + (a[1] - uy) ** 2


def polygon_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class TestDelaunay:
    def test_three_points_single_triangle(self):
        tri = delaunay([(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)])
        assert tri.triangles.shape == (1, 3)
        assert sorted(tri.triangles[0]) == [0, 1, 2]
        a, b, c = tri.points[tri.triangles[0]]
        assert (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) > 0  # CCW

    def test_square_splits_into_two_with_tie(self):
        tri = delaunay([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
        assert tri.triangles.shape == (2, 3)
        assert tri.had_ties
        total = sum(abs(polygon_area(tri.points[t])) for t in tri.triangles)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_collinear_rejected(self):
        with pytest.raises(errors.DegenerateGeometryError):
            delaunay([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)])

    def test_duplicates_rejected(self):
        with pytest.raises(errors.InvalidInputError) as e:
            delaunay([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])
        assert "1" in str(e.value) and "3" in str(e.value)

    def test_too_few_points(self):
        with pytest.raises(errors.InvalidInputError):
            delaunay([(0.0, 0.0), (1.0, 0.0)])

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        pts = rng.random((30, 2))
        a, b = delaunay(pts), delaunay(pts)
        assert np.array_equal(a.triangles, b.triangles)

    def test_empty_circumcircle_property(self, rng):
        # Brute force: no point strictly inside any triangle's circumcircle.
        pts = rng.random((60, 2))
        tri = delaunay(pts)
        assert isinstance(tri, Triangulation)
        for t in tri.triangles:
            (cx, cy), r2 = circumcircle(*pts[t])
            d2 = (pts[:, 0] - cx) ** 2 + (pts[:, 1] - cy) ** 2
            inside = d2 < r2 * (1.0 - 1e-9)
            inside[t] = False
            assert not inside.any()

    def test_covers_convex_hull(self, rng):
        pts = rng.random((40, 2))
        tri = delaunay(pts)
        total = sum(abs(polygon_area(pts[t])) for t in tri.triangles)
        assert total == pytest.approx(abs(polygon_area(convex_hull(pts))), rel=1e-9)

    def test_triangle_count_matches_euler(self, rng):
        pts = rng.random((50, 2))
        tri = delaunay(pts)
        h = len(convex_hull(pts))
        assert tri.triangles.shape[0] == 2 * len(pts) - 2 - h

    def test_grid_points_handled(self):
        # Many co-circular quadruples; result must still satisfy Delaunay-with-ties.
        pts = square_lattice(4, 4)
        tri = delaunay(pts)
        assert tri.had_ties
        total = sum(abs(polygon_area(tri.points[t])) for t in tri.triangles)
        assert total == pytest.approx(9.0, abs=1e-9)


class TestPointSetValidation:
    def test_point_outside_box(self):
        with pytest.raises(errors.InvalidInputError):
            PointSet(np.array([[0.5, 0.5], [2.0, 0.5], [0.1, 0.1]]), (0, 0, 1, 1))

    def test_near_duplicates(self):
        with pytest.raises(errors.InvalidInputError) as e:
            PointSet(np.array([[0.5, 0.5], [0.5 + 1e-12, 0.5], [0.1, 0.1]]), (0, 0, 1, 1))
        assert "0" in str(e.value) and "1" in str(e.value)

    def test_inverted_box(self):
        with pytest.raises(errors.InvalidInputError):
            PointSet(np.array([[0.5, 0.5]]), (1, 0, 0, 1))

    def test_on_boundary_allowed(self):
        ps = PointSet(np.array([[0.0, 0.0], [1.0, 0.5], [0.5, 1.0]]), (0, 0, 1, 1))
        assert ps.size == 3


class TestVoronoiLattices:
    def test_square_lattice_interior_cells(self):
        pts = square_lattice(5, 5)
        results = voronoi_cells(pts, box=(0, 0, 4, 4), s_max=8)
        interior = [r for r in results if not r.is_border]
        assert len(interior) == 9
        for r in interior:
            assert r.metrics.area() == pytest.approx(1.0, abs=1e-9)
            assert r.metrics.msm(4) >= 1.0 - 1e-9
            assert r.metrics.msm(6) <= 1e-9

    def test_triangular_lattice_interior_cells(self):
        pts = triangular_lattice(8, 8)
        box = (pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max())
        results = voronoi_cells(pts, box=box, s_max=8)
        interior = [r for r in results if not r.is_border]
        assert len(interior) > 10
        for r in interior:
            assert r.metrics.msm(6) >= 1.0 - 1e-9
            # Hexagon dual cell: inradius = spacing/2, area = spacing^2 * sqrt(3)/2.
            assert r.metrics.area() == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-9)

    def test_seven_point_hexagon_center_cell(self):
        angles = [k * math.pi / 3.0 for k in range(6)]
        pts = np.array([[0.0, 0.0]] + [[math.cos(a), math.sin(a)] for a in angles])
        results = voronoi_cells(pts, box=(-2, -2, 2, 2), s_max=8)
        center = results[0]
        assert not center.is_border
        assert center.metrics.msm(6) == pytest.approx(1.0, abs=1e-9)
        assert center.metrics.area() == pytest.approx(math.sqrt(3.0) / 2.0, rel=1e-9)
        assert center.metrics.perimeter() == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-9)


class TestVoronoiGeometry:
    @pytest.fixture
    def random_results(self, rng):
        pts = rng.random((40, 2))
        return pts, voronoi_cells(pts, box=(0, 0, 1, 1), s_max=6)

    def test_partition_of_box(self, random_results):
        _, results = random_results
        total = sum(r.metrics.area() for r in results)
        assert total == pytest.approx(1.0, rel=1e-9)

    def test_cells_convex_and_contain_generator(self, random_results):
        _, results = random_results
        for r in results:
            v = r.cell
            nxt = np.roll(v, -1, axis=0)
            prv = np.roll(v, 1, axis=0)
            cross = (v[:, 0] - prv[:, 0]) * (nxt[:, 1] - v[:, 1]) - (v[:, 1] - prv[:, 1]) * (
                nxt[:, 0] - v[:, 0]
            )
            assert (cross >= -1e-9).all()
            edge_cross = (nxt[:, 0] - v[:, 0]) * (r.generator[1] - v[:, 1]) - (
                nxt[:, 1] - v[:, 1]
            ) * (r.generator[0] - v[:, 0])
            assert (edge_cross >= -1e-9).all()

    def test_probes_land_in_nearest_generator_cell(self, random_results, rng):
        pts, results = random_results
        probes = rng.random((1000, 2))
        d = np.hypot(probes[:, 0, None] - pts[None, :, 0], probes[:, 1, None] - pts[None, :, 1])
        order = np.argsort(d, axis=1)
        for probe, row, drow in zip(probes, order, d):
            if drow[row[1]] - drow[row[0]] < 1e-9:
                continue  # probe essentially on a bisector; membership is ambiguous
            v = results[row[0]].cell
            nxt = np.roll(v, -1, axis=0)
            edge_cross = (nxt[:, 0] - v[:, 0]) * (probe[1] - v[:, 1]) - (nxt[:, 1] - v[:, 1]) * (
                probe[0] - v[:, 0]
            )
            assert (edge_cross >= -1e-7).all()

    def test_vertices_equidistant_to_three_generators(self, random_results):
        pts, results = random_results
        tol = 1e-9
        for r in results:
            for v in r.cell:
                if min(v[0], v[1], 1.0 - v[0], 1.0 - v[1]) < 1e-9:
                    continue  # box corner/edge vertex, not a Voronoi vertex
                d = np.sort(np.hypot(pts[:, 0] - v[0], pts[:, 1] - v[1]))
                assert d[2] - d[0] <= tol * max(d[0], 1e-30)

    def test_interior_vertices_are_delaunay_circumcenters(self, rng):
        # Dual route: half-plane cells and the triangulation must agree.
        pts = rng.random((30, 2))
        results = voronoi_cells(pts, box=(0, 0, 1, 1))
        tri = delaunay(pts)
        centers = np.array([circumcircle(*pts[t])[0] for t in tri.triangles])
        for r in results:
            for v in r.cell:
                if min(v[0], v[1], 1.0 - v[0], 1.0 - v[1]) < 1e-9:
                    continue
                gap = np.hypot(centers[:, 0] - v[0], centers[:, 1] - v[1]).min()
                assert gap <= 1e-9

    def test_collinear_generators_make_strips(self):
        pts = np.array([[0.2, 0.5], [0.5, 0.5], [0.8, 0.5]])
        results = voronoi_cells(pts, box=(0, 0, 1, 1))
        assert sum(r.metrics.area() for r in results) == pytest.approx(1.0, rel=1e-12)
        assert results[1].metrics.area() == pytest.approx(0.3, rel=1e-12)
        assert all(r.is_border for r in results)


class TestBoundaryPolicies:
    def test_unknown_policy(self):
        with pytest.raises(errors.InvalidInputError):
            voronoi_cells(np.eye(3, 2) + 0.1, box=(0, 0, 2, 2), policy="reflect")

    def test_exclude_border_drops_flagged_cells(self, rng):
        pts = rng.random((60, 2))
        clipped = analyze_point_pattern(pts, box=(0, 0, 1, 1), policy="clip")
        interior = analyze_point_pattern(pts, box=(0, 0, 1, 1), policy="exclude-border")
        assert 0 < len(interior) < len(clipped)
        assert not any(r.is_border for r in interior)
        assert len(interior) == sum(1 for r in clipped if not r.is_border)

    def test_periodic_requires_interior_points(self):
        pts = np.array([[0.0, 0.0], [0.5, 0.5], [0.2, 0.7]])
        with pytest.raises(errors.InvalidInputError):
            voronoi_cells(pts, box=(0, 0, 1, 1), policy="periodic")

    def test_periodic_lattice_cells_congruent(self):
        nx, ny = 6, 4
        pts = triangular_lattice(nx, ny)
        # Exact lattice periods: width nx * spacing, height ny * spacing * sqrt(3)/2.
        box = (-0.25, -math.sqrt(3.0) / 4.0, nx - 0.25, (ny - 0.5) * math.sqrt(3.0) / 2.0)
        w = box[2] - box[0]
        h = box[3] - box[1]
        results = voronoi_cells(pts, box=box, policy="periodic", s_max=8)
        assert len(results) == nx * ny
        areas = np.array([r.metrics.area() for r in results])
        np.testing.assert_allclose(areas, w * h / (nx * ny), rtol=1e-9)
        q6 = np.array([r.metrics.msm(6) for r in results])
        assert (q6 >= 1.0 - 1e-9).all()
        assert not any(r.is_border for r in results)

    def test_periodic_random_cells_tile_box(self, rng):
        pts = 0.05 + 0.9 * rng.random((25, 2))
        results = voronoi_cells(pts, box=(0, 0, 1, 1), policy="periodic")
        assert sum(r.metrics.area() for r in results) == pytest.approx(1.0, rel=1e-9)


class TestHistogram:
    def test_lattice_mass_in_top_bin(self):
        pts = triangular_lattice(10, 10)
        box = (pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max())
        results = analyze_point_pattern(pts, box=box, policy="exclude-border", s_max=8)
        hist = q_histogram(results, s=6, bins=50)
        assert isinstance(hist, Histogram)
        assert hist.counts.sum() == len(results)
        assert hist.counts[-1] == len(results)

    def test_empty_selection(self):
        pts = np.array([[0.2, 0.2], [0.8, 0.2], [0.5, 0.9]])
        results = voronoi_cells(pts, box=(0, 0, 1, 1))  # every cell touches the box
        with pytest.raises(errors.EmptySelectionError):
            q_histogram(results, s=6, bins=10, include_border=False)
        hist = q_histogram(results, s=6, bins=10, include_border=True)
        assert hist.counts.sum() == 3

    def test_poisson_pattern_is_broad(self, rng):
        pts = rng.random((250, 2))
        results = analyze_point_pattern(pts, box=(0, 0, 1, 1), policy="exclude-border", s_max=8)
        q6 = np.array([r.metrics.msm(6) for r in results])
        assert 0.1 < q6.mean() < 0.8
        hist = q_histogram(results, s=6, bins=20)
        assert (hist.counts > 0).sum() >= 4

    def test_crystal_in_amorphous_background_is_bimodal(self, rng):
        lattice = triangular_lattice(6, 6) + np.array([4.0, 4.0])
        background = []
        while len(background) < 120:
            p = rng.random(2) * 14.0
            if np.hypot(*(lattice - p).T).min() > 1.2 and all(
                np.hypot(*(np.array(b) - p)) > 0.35 for b in background
            ):
                background.append(tuple(p))
        pts = np.vstack([lattice, np.array(background)])
        results = analyze_point_pattern(pts, box=(0, 0, 14, 14), policy="exclude-border", s_max=8)
        hist = q_histogram(results, s=6, bins=20)
        assert hist.counts.sum() == len(results)
        assert hist.counts[-1] >= 10  # crystal component at q6 ~ 1
        assert hist.counts[: 16].sum() >= 20  # amorphous component well below
