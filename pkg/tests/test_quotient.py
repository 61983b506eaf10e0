import json
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.errors import BadDiscriminant, SearchBudgetTooSmall
from flatcyl.flow import saddle_directions, translation_isomorphic
from flatcyl.quotient import (
    GOLDEN_EDGES,
    Prototype,
    classify_direction,
    enumerate_prototypes,
    is_prototype,
    matches_golden,
    quotient_graph,
    six_square_edge_experiment,
)
from flatcyl.surface import build_prototype_surface


def brute_prototypes(D):
    out = []
    for b in range(1, D + 1):
        for c in range(1, D + 1):
            for e in range(-D, D + 1):
                if e * e + 4 * b * c != D or not c + e < b:
                    continue
                for a in range(gcd(b, c)):
                    if gcd(gcd(a, b), gcd(c, e)) == 1:
                        out.append((a, b, c, e))
    return sorted(out)


@pytest.mark.parametrize("D", [d for d in range(5, 90) if d % 4 in (0, 1)])
def test_enumeration_matches_brute_force(D):
    assert [tuple(p) for p in enumerate_prototypes(D)] == brute_prototypes(D)


def test_prototype_basics():
    p = Prototype(0, 1, 1, -1)
    assert p.D == 5 and str(p) == "(0,1,1,-1)"
    assert p.lam * p.lam == p.e * p.lam + p.b * p.c
    assert is_prototype(0, 1, 1, -1, 5) and not is_prototype(1, 1, 1, 1, 5)
    for D in (4, 6, 7):
        with pytest.raises(BadDiscriminant):
            enumerate_prototypes(D)


PROTOS = [p for D in (5, 8, 9, 12, 13, 17) for p in enumerate_prototypes(D)]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(PROTOS), st.integers(0, 100))
def test_two_cylinder_normal_form_maps_onto_prototype(p, k):
    S = build_prototype_surface(p)
    dirs = saddle_directions(S, 6)
    dc = classify_direction(S, dirs[k % len(dirs)])
    if dc.kind != "two":
        assert dc.prototype is None
        return
    assert translation_isomorphic(S.transformed(dc.frame), build_prototype_surface(dc.prototype))


def test_horizontal_direction_is_the_prototype_itself():
    for p in PROTOS:
        dc = classify_direction(build_prototype_surface(p), saddle_directions(build_prototype_surface(p), 1)[0])
        if dc.kind == "two" and dc.direction.vector.y == 0:
            assert dc.prototype == p


@pytest.mark.parametrize("D", [5, 9])
def test_small_goldens(D):
    G = quotient_graph(D)
    assert matches_golden(G)
    assert G.signature() == (len(G.vertices), tuple(sorted(G.edges.items())))
    assert sum(GOLDEN_EDGES[D].values()) == len(G.edge_list())


def test_d9_degenerate_vertex():
    G = quotient_graph(9)
    kinds = sorted(v.kind for v in G.vertices)
    assert kinds == ["Degenerate", "OneCyl", "TwoCyl", "TwoCyl"]
    loop, = G.loops()
    assert loop.endswith(":simple")


def test_exports_are_deterministic():
    a = json.dumps(quotient_graph(5).to_json(), sort_keys=True)
    assert a == json.dumps(quotient_graph(5).to_json(), sort_keys=True)
    dot = quotient_graph(5).to_dot()
    assert dot.startswith('graph "quotient_D5"') and dot.count("--") == 2


def test_strict_search_radius():
    with pytest.raises(SearchBudgetTooSmall):
        quotient_graph(5, search_r2=1)


def test_six_square_edge_experiment():
    rep = six_square_edge_experiment(3)
    assert [r["iota"] for r in rep["rows"]] == [0, 2, 4, 6]
    assert [r["direction"] for r in rep["rows"]] == [[1, 0], [1, 2], [1, 4], [1, 6]]
    assert rep["ok"]
