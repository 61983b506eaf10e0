from fractions import Fraction as F
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.errors import NoRoom, PreconditionFailed
from flatcyl.exactnum import FieldElement, Vec2
from flatcyl.flow import (
    bounded_circumference_cylinder,
    compute_involution,
    cylinder_decomposition,
    enumerate_saddle_connections,
    fmod,
    saddle_directions,
    slit_disjoint_cylinder,
    sqrt_lower_bound,
    translation_isomorphic,
)
from flatcyl.quotient import enumerate_prototypes
from flatcyl.surface import (
    build_prototype_surface,
    build_regular_octagon,
    build_slit_torus,
    build_square_tiled,
    one_cylinder_origami,
    six_square_surface,
)
from flatcyl.surface import SIX_SQUARE_H, SIX_SQUARE_V
from oracles import Origami

LAM = FieldElement(-1, 1, 2, 5)  # side of the small square of the golden L
PHI = LAM + 1

ORIGAMIS = [
    (SIX_SQUARE_H, SIX_SQUARE_V, 6),
    ("(1,2,3)", "(1)(2,3)", 3),
    ("(1,2,3,4)", "(1,2)(3,4)", 4),
    ("(1,2)(3,4,5)", "(1,3)(2)(4)(5)", 5),
    ("(1,2,3)(4)", "(1,4)(2)(3)", 4),
]


def golden_l():
    return build_prototype_surface((0, 1, 1, -1))


def summary(dec):
    return sorted((c.area, c.circumference2, c.simple) for c in dec.cylinders)


def test_golden_l_horizontal_and_vertical():
    L = golden_l()
    assert summary(cylinder_decomposition(L, Vec2(1, 0))) == sorted([(1, 1, False), (LAM * LAM, LAM * LAM, True)])
    # left column lam x (1 + lam), right strip (1 - lam) x 1
    assert summary(cylinder_decomposition(L, Vec2(0, 1))) == sorted([(LAM * PHI, PHI * PHI, False),
                                                                     (1 - LAM, 1, True)])


def test_six_square_cylinders():
    S = six_square_surface()
    assert summary(cylinder_decomposition(S, Vec2(1, 0))) == [(1, 1, True), (2, 4, True), (3, 9, False)]
    assert summary(cylinder_decomposition(S, Vec2(0, 1))) == [(2, 4, False), (4, 4, False)]


@pytest.mark.parametrize("h, v, n", ORIGAMIS)
def test_saddle_counts_match_lattice_walk(h, v, n):
    S = build_square_tiled(h, v, mode="genus2")
    O = Origami(h, v, n)
    for r2 in (1, 2, 5, 10, 25):
        assert len(enumerate_saddle_connections(S, r2)) == O.saddle_count(r2)


def test_saddle_connections_sorted_and_bounded():
    L = golden_l()
    sc = enumerate_saddle_connections(L, 4)
    assert all(s.length2() <= 4 for s in sc)
    assert len({s.canonical_key() for s in sc}) == len(sc)
    with pytest.raises(PreconditionFailed):
        enumerate_saddle_connections(L, 0)


SURFACES = [golden_l(), build_prototype_surface(enumerate_prototypes(8)[0]),
            build_prototype_surface(enumerate_prototypes(13)[0]), build_regular_octagon(),
            six_square_surface(), one_cylinder_origami(3), one_cylinder_origami(4)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SURFACES), st.integers(0, 30))
def test_decomposition_invariants(S, k):
    dirs = saddle_directions(S, 9)
    dec = cylinder_decomposition(S, dirs[k % len(dirs)])
    assert dec.periodic  # all of these surfaces are Veech
    assert sum((c.area for c in dec.cylinders), FieldElement(0)) == S.area
    for c in dec.cylinders:
        assert c.mu.sign() > 0 and c.eta.sign() > 0
        assert len(c.bottom) == len(c.top)
        assert c.simple == (len(c.bottom) == 1)
    for g in dec.degenerates:
        assert g.area == 0


@pytest.mark.parametrize("S", SURFACES[:4] + SURFACES[5:6], ids=lambda s: s.stratum)
def test_involution(S):
    inv = compute_involution(S)
    for s in enumerate_saddle_connections(S, 4):
        image = inv.map_saddle(s)
        assert image.holonomy == -s.holonomy
        assert inv.map_saddle(image).key == s.key
    for d in saddle_directions(S, 4):
        dec = cylinder_decomposition(S, d)
        for c in dec.cylinders:
            bd = [dec.saddles[i] for side in c.boundary_saddles for i in side]
            assert {inv.map_saddle(x).canonical_key() for x in bd} == {x.canonical_key() for x in bd}


def test_translation_isomorphic():
    L = golden_l()
    assert translation_isomorphic(L, L.transformed(((1, 0), (0, 1))))
    assert not translation_isomorphic(L, L.transformed(((1, "1/3"), (0, 1))))
    assert not translation_isomorphic(six_square_surface(), build_square_tiled(*ORIGAMIS[3][:2], mode="genus2"))


def test_fmod():
    assert fmod(FieldElement(7, 0, 2), FieldElement(1)) == F(1, 2)
    assert fmod(FieldElement(-1, 0, 3), FieldElement(1)) == F(2, 3)
    x = fmod(PHI * 3, LAM)
    assert 0 <= x < LAM and ((PHI * 3 - x) / LAM).is_rational()


def test_slit_split():
    T = build_slit_torus(((1, 0), (0, 1)), (1, "1/3"), "1/2")
    split = slit_disjoint_cylinder(T, (1, 0))
    assert split.containing_area == F(1, 6) and split.disjoint.area == F(5, 6)
    with pytest.raises(NoRoom):
        slit_disjoint_cylinder(build_slit_torus(((1, 0), (0, 1)), (1, "1/3"), "3/4"), (1, 5))
    with pytest.raises(PreconditionFailed):
        slit_disjoint_cylinder(T, (2, 4))


def test_bounded_circumference_preconditions():
    T = build_slit_torus(((2, 0), (0, 1)), (1, "1/3"), "1/2")
    with pytest.raises(PreconditionFailed):
        bounded_circumference_cylinder(T, 2)
    U = build_slit_torus(((1, 0), (0, 1)), (1, "1/3"), "3/2")
    with pytest.raises(PreconditionFailed):
        bounded_circumference_cylinder(U, 1)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_sqrt_lower_bound(num, den):
    r = sqrt_lower_bound(num, den, 12)
    assert r * r * den <= num
    assert (r + F(1, 10**12)) ** 2 * den > num or isqrt(num * 10**24 // den) == r * 10**12
