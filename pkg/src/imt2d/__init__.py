"""2D irreducible Minkowski tensors and structure metrics.

Analyze closed polygons, excursion sets of greyscale images (interpolated
marching squares), and planar point patterns (Voronoi cells) in terms of the
complex boundary coefficients psi_s and the normalized metrics q_s.
"""

from . import errors
from .bindings import analyze_request
from .core import (
    DEFAULT_S_MAX,
    MinkowskiAccumulator,
    imt_polygon,
    is_simple_polygon,
    merge,
    polygon_signed_area,
    validate_polygon,
)
from .delaunay import Triangulation, delaunay
from .io import ResultRow, load_image, read_points, read_polygon, write_results
from .marching import (
    GreyscaleImage,
    MarchingSquaresConfig,
    MinkowskiMapGrid,
    edge_crossing,
    imt_interpolated_marching_squares,
    minkowski_map,
    ms_case,
    threshold_sweep,
)
from .voronoi import (
    BOUNDARY_POLICIES,
    Histogram,
    PointSet,
    VoronoiCellResult,
    analyze_point_pattern,
    q_histogram,
    voronoi_cells,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_POLICIES",
    "DEFAULT_S_MAX",
    "GreyscaleImage",
    "Histogram",
    "MarchingSquaresConfig",
    "MinkowskiAccumulator",
    "MinkowskiMapGrid",
    "PointSet",
    "ResultRow",
    "Triangulation",
    "VoronoiCellResult",
    "analyze_point_pattern",
    "analyze_request",
    "delaunay",
    "edge_crossing",
    "errors",
    "imt_interpolated_marching_squares",
    "imt_polygon",
    "is_simple_polygon",
    "load_image",
    "merge",
    "minkowski_map",
    "ms_case",
    "polygon_signed_area",
    "q_histogram",
    "read_points",
    "read_polygon",
    "threshold_sweep",
    "validate_polygon",
    "voronoi_cells",
    "write_results",
    "__version__",
]
