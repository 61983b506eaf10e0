"""Exact computations with cylinders on genus-two translation surfaces."""

from .cylgraph import build_ball, connect_path, estimate_hyperbolicity, find_triangle
from .exactnum import Direction, FieldElement, Vec2, dot, fe, wedge
from .flow import (
    compute_involution,
    cylinder_decomposition,
    enumerate_saddle_connections,
    slit_disjoint_cylinder,
)
from .polygon import canonical_polygon_form, embedded_parallelogram, invariant_triangulation
from .quotient import classify_direction, enumerate_prototypes, quotient_graph
from .surface import (
    Surface,
    build_from_polygons,
    build_prototype_surface,
    build_regular_octagon,
    build_slit_torus,
    build_square_tiled,
    one_cylinder_origami,
    six_square_surface,
    surface_from_json,
    surface_to_json,
)
from .topology import intersection_number

__version__ = "0.1.0"
