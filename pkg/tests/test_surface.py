import json

import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.errors import (
    DegenerateLattice,
    InputError,
    InvalidPrototype,
    MismatchedEdge,
    NonConvexPolygon,
    NotConnected,
    SlitThroughLatticePoint,
    WrongGenus,
)
from flatcyl.exactnum import FieldElement, Vec2
from flatcyl.flow import translation_isomorphic
from flatcyl.quotient import enumerate_prototypes
from flatcyl.surface import (
    Surface,
    build_prototype_surface,
    build_regular_octagon,
    build_slit_torus,
    build_square_tiled,
    one_cylinder_origami,
    six_square_surface,
    surface_from_json,
    surface_to_json,
)
from oracles import Origami

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_prototype_surfaces_are_h2_with_expected_area():
    for D in range(5, 41):
        if D % 4 not in (0, 1):
            continue
        for p in enumerate_prototypes(D):
            S = build_prototype_surface(p)
            assert S.stratum == "H(2)"
            assert S.area == p.lam * p.lam + p.b * p.c


def test_golden_l_area():
    S = build_prototype_surface((0, 1, 1, -1))
    assert S.area == FieldElement(5, -1, 2, 5)


def test_regular_octagon():
    O = build_regular_octagon()
    assert O.stratum == "H(2)"
    assert O.area == FieldElement(2, 2, 1, 2)
    assert [O.cone_angle_pi(c) for c in O.singular] == [6]


def test_builtin_origamis():
    assert one_cylinder_origami(3).stratum == "H(2)"
    assert one_cylinder_origami(4).stratum == "H(1,1)"
    six = six_square_surface()
    assert six.stratum == "H(1,1)" and six.area == 6


def test_slit_torus():
    T = build_slit_torus(((1, 0), (0, 1)), (1, "1/3"), "1/2")
    assert T.genus == 1 and T.area == 1
    assert len(T.singular) == 2
    assert T.meta["slit"] == Vec2("1/2", "1/6")


@pytest.mark.parametrize("build, error", [
    (lambda: build_prototype_surface((1, 1, 1, 1)), InvalidPrototype),
    (lambda: build_slit_torus(((1, 0), (2, 0)), (1, 1)), DegenerateLattice),
    (lambda: build_slit_torus(((1, 0), (0, 1)), (2, 2)), SlitThroughLatticePoint),
    (lambda: build_square_tiled("(1,2)", "(1,2)", mode="genus2"), WrongGenus),
    (lambda: build_square_tiled("(1)(2)", "(1)(2)"), NotConnected),
    (lambda: Surface([SQUARE], [(0, 0, 0, 2)], mode="torus"), MismatchedEdge),
    (lambda: Surface([SQUARE], [(0, 0, 0, 1), (0, 2, 0, 3)], mode="torus"), MismatchedEdge),
    (lambda: Surface([[(0, 0), (0, 1), (1, 1), (1, 0)]], [(0, 0, 0, 2), (0, 1, 0, 3)], mode="torus"),
     NonConvexPolygon),
])
def test_validation_errors(build, error):
    with pytest.raises(error):
        build()


def test_json_round_trip_and_determinism():
    for S in (build_prototype_surface((0, 1, 1, -1)), build_regular_octagon(), six_square_surface()):
        data = surface_to_json(S)
        text = json.dumps(data, sort_keys=True)
        assert json.dumps(surface_to_json(surface_from_json(text)), sort_keys=True) == text
        assert translation_isomorphic(S, surface_from_json(data))


def test_json_reader_normalises_and_validates():
    data = surface_to_json(build_prototype_surface((0, 1, 1, -1)))
    x = data["polygons"][0][1][0]
    x.update({"a": 2 * x["a"], "b": 2 * x["b"], "den": 2 * x["den"]})
    S = surface_from_json(data)
    assert S.area == FieldElement(5, -1, 2, 5)
    data["schema"] = 99
    with pytest.raises(InputError):
        surface_from_json(data)


def test_shear_preserves_area():
    S = build_prototype_surface((0, 2, 1, -1))
    assert S.transformed(((1, "1/3"), (0, 1))).area == S.area
    assert S.transformed(((2, 0), (0, 1))).area == 2 * S.area


def cycles(perm):
    n, seen, out = len(perm), set(), ""
    for i in range(1, n + 1):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j - 1]
        out += "(" + ",".join(map(str, cyc)) + ")"
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(st.permutations(range(1, n + 1)),
                                                     st.permutations(range(1, n + 1)))))
def test_origami_cone_angles_match_oracle(perms):
    h, v = (cycles(list(p)) for p in perms)
    n = len(perms[0])
    try:
        S = build_square_tiled(h, v)
    except NotConnected:
        return
    O = Origami(h, v, n)
    assert sorted(S.cone_angle_pi(c) for c in S.zeros) == O.cone_angles_pi
    # Gauss-Bonnet: sum of (k - 1) over cone angles 2*pi*k is 2g - 2
    assert sum(a // 2 - 1 for a in O.cone_angles_pi) == 2 * S.genus - 2
    assert S.area == n
