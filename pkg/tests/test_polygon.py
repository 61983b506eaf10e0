from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.errors import PreconditionFailed
from flatcyl.exactnum import Vec2
from flatcyl.flow import compute_involution, cylinder_decomposition, enumerate_saddle_connections
from flatcyl.polygon import (
    canonical_polygon_form,
    classify_decagon,
    embedded_parallelogram,
    invariant_triangulation,
    polygon_model_from_vertices,
    rebuild_matches,
)
from flatcyl.surface import build_prototype_surface, build_slit_torus

# clockwise P-side and Q-side vertices of reference polygons
FIGURES = {
    "octagon": ([(1, 2), (3, 6), (6, 7), (7, 2)], [(6, 0), (4, -4), (1, -5), (0, 0)]),
    "I": ([(1, 2), (3, 7), (5, 6), (8, 7), (9, 2)], [(8, 0), (6, -5), (4, -4), (1, -5), (0, 0)]),
    "II": ([(1, 2), (3, 7), (5, 6), (6, 4), (9, 2)], [(8, 0), (6, -5), (4, -4), (3, -2), (0, 0)]),
    "III": ([(1, 2), (3, 3), (5, 7), (6, 4), (9, 2)], [(8, 0), (6, -1), (4, -5), (3, -2), (0, 0)]),
}


def horizontal_invariant(S):
    inv = compute_involution(S)
    return [s for s in enumerate_saddle_connections(S, S.area * 4)
            if not s.holonomy.y and s.holonomy.x.sign() > 0 and inv.is_invariant(s)]


def simple_horizontal(S):
    return [c for c in cylinder_decomposition(S, Vec2(1, 0)).cylinders if c.simple]


@pytest.mark.parametrize("name", FIGURES)
def test_reference_polygons(name):
    P, Q = FIGURES[name]
    m = polygon_model_from_vertices(P, Q)
    assert m.kind == ("octagon" if name == "octagon" else "decagon")
    assert m.model == (None if name == "octagon" else name)
    assert all(m.checks().values())
    S = m.to_surface()
    assert S.stratum == ("H(2)" if name == "octagon" else "H(1,1)")


@pytest.mark.parametrize("name", FIGURES)
def test_canonical_form_round_trip(name):
    m = polygon_model_from_vertices(*FIGURES[name])
    S = m.to_surface()
    found = [canonical_polygon_form(S, C) for C in simple_horizontal(S)]
    assert any(out.vertices == m.vertices for out in found)
    for out in found:
        assert all(out.checks().values())
        assert rebuild_matches(S, out)


def test_decagon_classification_is_exclusive():
    kinds = {classify_decagon(polygon_model_from_vertices(*FIGURES[k])) for k in ("I", "II", "III")}
    assert kinds == {"I", "II", "III"}


def test_golden_l_parallelogram_inside_long_cylinder():
    S = build_prototype_surface((0, 1, 1, -1)).transformed(((1, F(1, 3)), (0, 1)))
    long_cyl, = [c for c in cylinder_decomposition(S, Vec2(1, 0)).cylinders if not c.simple]
    short, = simple_horizontal(S)
    s = horizontal_invariant(S)[0]
    ep = embedded_parallelogram(S, s)
    assert ep.eta.sign() > 0
    # the parallelogram is at most as tall as the complement of the simple cylinder
    assert ep.eta <= long_cyl.eta
    assert ep.upper.area + ep.lower.area <= S.area - short.area


def test_vertical_saddle_connection_rejected():
    S = build_prototype_surface((0, 1, 1, -1))
    inv = compute_involution(S)
    vert = [s for s in enumerate_saddle_connections(S, 4) if not s.holonomy.x and inv.is_invariant(s)]
    with pytest.raises(PreconditionFailed):
        embedded_parallelogram(S, vert[0])


@pytest.mark.parametrize("shear, config", [(F(1, 3), {"start", "end"}), (F(-1, 3), {"start", "end"})])
def test_slit_torus_triangulations(shear, config):
    T = build_slit_torus(((1, 0), (shear, 1)), (1, 0), F(1, 2))
    seen = set()
    for s in horizontal_invariant(T):
        tr = invariant_triangulation(T, s)
        assert sum(t.area for t in tr.triangles) == T.area
        seen.add(tr.configuration)
    assert seen <= config and seen


@pytest.mark.parametrize("proto, shear", [((0, 1, 1, -1), F(1, 3)), ((0, 2, 1, 0), F(-2, 5))])
def test_h2_triangulation_tiles(proto, shear):
    S = build_prototype_surface(proto).transformed(((1, shear), (0, 1)))
    for s in horizontal_invariant(S):
        if s.holonomy.x >= S.area:
            continue
        tr = invariant_triangulation(S, s)
        assert sum(t.area for t in tr.triangles) == S.area
        assert len(tr.triangles) == 6
        assert tr.configuration in ("a", "b-start", "b-end")


def test_precondition_without_shear():
    S = build_prototype_surface((0, 1, 1, -1))
    with pytest.raises(PreconditionFailed):
        canonical_polygon_form(S, simple_horizontal(S)[0])


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([(0, 1, 1, -1), (0, 2, 1, 0), (0, 1, 1, -2), (0, 2, 1, -1)]),
       st.sampled_from([F(1, 3), F(1, 2), F(2, 3), F(-1, 3), F(-2, 5), F(3, 7)]))
def test_canonical_form_property(proto, shear):
    S = build_prototype_surface(proto).transformed(((1, shear), (0, 1)))
    try:
        out = canonical_polygon_form(S, simple_horizontal(S)[0])
    except PreconditionFailed:
        return
    assert all(out.checks().values())
    assert rebuild_matches(S, out)
