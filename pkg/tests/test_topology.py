import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.errors import PreconditionFailed
from flatcyl.exactnum import Vec2
from flatcyl.flow import cylinder_decomposition, saddle_directions
from flatcyl.surface import build_prototype_surface, one_cylinder_origami, six_square_surface
from flatcyl.topology import (
    brute_force_intersection,
    deformation_intersection,
    disjoint,
    intersection_number,
)


def by_area(dec):
    return {c.area.floor(): c for c in dec.cylinders}


def test_six_square_grid():
    # rows {1}, {5,6}, {2,3,4}; vertical cylinders: column {1,2} (core at its
    # middle) and the 2x2 block {3,4,5,6} (core on the line between its columns)
    S = six_square_surface()
    H = by_area(cylinder_decomposition(S, Vec2(1, 0)))
    V = by_area(cylinder_decomposition(S, Vec2(0, 1)))
    expected = {(1, 2): 1, (1, 4): 0, (2, 2): 0, (2, 4): 1, (3, 2): 1, (3, 4): 1}
    for (h, v), n in expected.items():
        assert intersection_number(S, H[h], V[v]) == n
        assert intersection_number(S, V[v], H[h]) == n
        assert brute_force_intersection(S, H[h], V[v]) == n
        assert disjoint(S, H[h], V[v]) == (n == 0)


def test_golden_l_horizontal_vertical():
    L = build_prototype_surface((0, 1, 1, -1))
    H = cylinder_decomposition(L, Vec2(1, 0)).cylinders
    V = cylinder_decomposition(L, Vec2(0, 1)).cylinders
    table = sorted(intersection_number(L, h, v) for h in H for v in V)
    # the simple square meets only the left column; the wide cylinder meets both
    assert table == [0, 1, 1, 1]


def test_parallel_cylinders_are_disjoint():
    S = six_square_surface()
    dec = cylinder_decomposition(S, Vec2(1, 0))
    for a in dec.cylinders:
        for b in dec.cylinders:
            assert intersection_number(S, a, b) == 0


def test_one_cylinder_degenerates():
    S = one_cylinder_origami(3)
    dec = cylinder_decomposition(S, Vec2(1, 0))
    V = cylinder_decomposition(S, Vec2(0, 1)).cylinders
    for g in dec.degenerates:
        assert disjoint(S, g, dec.cylinders[0])
        for v in V:
            assert intersection_number(S, g, v) == deformation_intersection(S, g, v)


def test_oracle_preconditions():
    S = one_cylinder_origami(3)
    dec = cylinder_decomposition(S, Vec2(1, 0))
    with pytest.raises(PreconditionFailed):
        brute_force_intersection(S, dec.degenerates[0], dec.cylinders[0])
    with pytest.raises(PreconditionFailed):
        deformation_intersection(S, dec.cylinders[0], dec.cylinders[0])


SURFACES = [build_prototype_surface((0, 1, 1, -1)), build_prototype_surface((0, 2, 1, -1)),
            six_square_surface(), one_cylinder_origami(4)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SURFACES), st.integers(0, 1000), st.integers(0, 1000))
def test_intersection_symmetric_and_matches_brute_force(S, i, j):
    dirs = saddle_directions(S, 5)
    c1 = cylinder_decomposition(S, dirs[i % len(dirs)]).cylinders
    c2 = cylinder_decomposition(S, dirs[j % len(dirs)]).cylinders
    a, b = c1[i % len(c1)], c2[j % len(c2)]
    n = intersection_number(S, a, b)
    assert n == intersection_number(S, b, a) >= 0
    assert n == brute_force_intersection(S, a, b)
