import json
from itertools import combinations
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from flatcyl.cylgraph import (
    Graph,
    build_ball,
    connect_path,
    estimate_hyperbolicity,
    find_triangle,
    guideline_diameter_report,
    slice_set,
)
from flatcyl.errors import DisconnectedBall, PreconditionFailed
from flatcyl.exactnum import Vec2
from flatcyl.flow import cylinder_decomposition
from flatcyl.surface import build_prototype_surface, six_square_surface
from flatcyl.topology import brute_force_intersection, intersection_number

graphs = st.integers(1, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=30)))


def to_nx(n, edges):
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from((i, j) for i, j in edges if i != j)
    return G


@given(graphs)
def test_graph_matches_networkx(data):
    n, edges = data
    g, G = Graph(n, edges), to_nx(n, edges)
    assert g.connected() == nx.is_connected(G)
    assert dict(g.bfs(0)) == dict(nx.single_source_shortest_path_length(G, 0))
    has_triangle = any(nx.triangles(G).values())
    assert (find_triangle(g) is not None) == has_triangle
    big = g.largest_component()
    assert big.n == max(len(c) for c in nx.connected_components(G))
    assert big.diameter() == (nx.diameter(G.subgraph(max(nx.connected_components(G), key=len)))
                              if big.n > 1 else 0)


def test_four_point_defects():
    cycle4 = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert estimate_hyperbolicity(cycle4) == 1
    tree = Graph(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])
    assert estimate_hyperbolicity(tree) == 0
    with pytest.raises(DisconnectedBall):
        estimate_hyperbolicity(Graph(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 9).flatmap(lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                                                    min_size=n, max_size=20).map(lambda e: (n, e))))
def test_four_point_defect_matches_brute_force(data):
    n, edges = data
    edges = edges + [(i, i + 1) for i in range(n - 1)]
    g, G = Graph(n, edges), to_nx(n, edges)
    d = dict(nx.all_pairs_shortest_path_length(G))
    best = F(0)
    for x, y, z, w in combinations(range(n), 4):
        s = sorted((d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]))
        best = max(best, F(s[2] - s[1], 2))
    assert estimate_hyperbolicity(g) == best


def test_golden_l_ball():
    L = build_prototype_surface((0, 1, 1, -1))
    ball = build_ball(L, 4)
    assert (ball.n, len(ball.edges())) == (32, 35)
    assert ball.recheck()
    assert find_triangle(ball) is None
    vs = ball.vertices
    brute = {(i, j) for i in range(ball.n) for j in range(i + 1, ball.n)
             if brute_force_intersection(L, vs[i], vs[j]) == 0}
    assert set(ball.edges()) == brute
    text = json.dumps(ball.to_json(centers=(0,)), sort_keys=True)
    assert text == json.dumps(build_ball(L, 4).to_json(centers=(0,)), sort_keys=True)
    assert json.loads(text)["distance_kind"] == "upper bound"
    assert "(1+0√0)/1" in ball.to_dot()


def test_six_square_triangle():
    S = six_square_surface()
    tri = find_triangle(build_ball(S, 4))
    assert tri is not None
    a, b, c = tri
    assert all(intersection_number(S, x, y) == 0 for x, y in ((a, b), (b, c), (a, c)))


def test_connect_path_cases():
    S = six_square_surface()
    H = cylinder_decomposition(S, Vec2(1, 0)).cylinders
    V = cylinder_decomposition(S, Vec2(0, 1)).cylinders
    res = connect_path(S, H[0], H[1])
    assert res.iota == 0 and res.length == 1 and res.ok
    for h in H:
        for v in V:
            r = connect_path(S, h, v)
            assert r.ok and r.length <= 3 * r.iota + 6
            assert r.path[0] == h and r.path[-1] == v
    with pytest.raises(PreconditionFailed):
        connect_path(S, H[0], H[0])


def test_slices_and_guideline_report():
    L = build_prototype_surface((0, 1, 1, -1))
    C = cylinder_decomposition(L, Vec2(1, 0)).cylinders[0]
    D = cylinder_decomposition(L, Vec2(0, 1)).cylinders[0]
    sl = slice_set(L, C, D, 2, range(-2, 3))
    assert set(sl.members) == set(range(-2, 3))
    assert all(sl.members[k] for k in sl.ks)
    report = guideline_diameter_report(sl)
    assert report["distance_kind"] == "upper bound"
    assert len(report["slices"]) == 5
    assert report["ok"]
