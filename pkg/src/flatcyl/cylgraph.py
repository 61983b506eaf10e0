"""Finite balls of the cylinder graph and the computations done on them.

A ball collects every cylinder (optionally with the degenerate ones) of
every direction carrying a saddle connection of length at most ``R``.
Two cylinders are joined when their cores are disjoint.  Distances read
off a ball are upper bounds for distances in the full graph and are
labelled that way in every export.
"""

from __future__ import annotations

import random
from collections import deque
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

from .errors import BudgetExceeded, DisconnectedBall, PreconditionFailed
from .exactnum import FieldElement, as_fe, dot, wedge
from .flow import Cylinder, cylinder_decomposition, saddle_directions
from .surface import DEFAULT_BUDGET, SCHEMA, Surface
from .topology import disjoint, intersection_number

__all__ = [
    "Graph",
    "CylGraphBall",
    "build_ball",
    "find_triangle",
    "connect_path",
    "PathResult",
    "path_certificate",
    "SliceSet",
    "slice_set",
    "guideline_diameter_report",
    "estimate_hyperbolicity",
    "DISTANCE_KIND",
]

DISTANCE_KIND = "upper bound"

K1, K2 = 3, 6
DEFAULT_K = Fraction(1, 10)


class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges=()):
        self.n = n
        self.adj = [set() for _ in range(n)]
        for i, j in edges:
            self.add_edge(i, j)

    def add_edge(self, i: int, j: int):
        if i != j:
            self.adj[i].add(j)
            self.adj[j].add(i)

    def edges(self):
        return [(i, j) for i in range(self.n) for j in sorted(self.adj[i]) if i < j]

    def bfs(self, src: int) -> dict:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def shortest_path(self, src: int, dst: int):
        prev = {src: None}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if u == dst:
                break
            for v in sorted(self.adj[u]):
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if dst not in prev:
            return None
        path = [dst]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        return path[::-1]

    def distance_table(self):
        return [self.bfs(i) for i in range(self.n)]

    def connected(self) -> bool:
        return self.n == 0 or len(self.bfs(0)) == self.n

    def components(self):
        """Vertex lists of the connected components, largest first."""
        seen, out = set(), []
        for i in range(self.n):
            if i not in seen:
                comp = sorted(self.bfs(i))
                seen.update(comp)
                out.append(comp)
        return sorted(out, key=lambda c: (-len(c), c[0]))

    def induced(self, verts) -> "Graph":
        pos = {v: i for i, v in enumerate(verts)}
        g = Graph(len(verts))
        for v in verts:
            for u in self.adj[v]:
                if u in pos:
                    g.add_edge(pos[v], pos[u])
        return g

    def largest_component(self) -> "Graph":
        comps = self.components()
        return self.induced(comps[0]) if comps else Graph(0)

    def diameter(self) -> int:
        """Largest finite distance (0 for an empty graph)."""
        return max((max(t.values()) for t in self.distance_table()), default=0)


class CylGraphBall(Graph):
    """Cylinders of the directions of saddle connections with
    ``|hol|^2 <= r2``; edges join cylinders with disjoint cores."""

    def __init__(self, surface: Surface, r2: FieldElement, include_degenerates: bool,
                 directions, skipped, vertices):
        super().__init__(len(vertices))
        self.surface = surface
        self.r2 = r2
        self.include_degenerates = include_degenerates
        self.directions = directions
        self.skipped = skipped
        self.vertices = vertices
        self.index = {c.key: i for i, c in enumerate(vertices)}

    def __contains__(self, cyl) -> bool:
        return cyl.key in self.index

    def __repr__(self):
        return f"CylGraphBall(r2={self.r2}, {self.n} vertices, {len(self.edges())} edges)"

    def _link_all(self):
        S = self.surface
        vs = self.vertices
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if disjoint(S, vs[i], vs[j]):
                    self.add_edge(i, j)

    def with_vertices(self, extra) -> "CylGraphBall":
        """A copy of the ball with further cylinders added (and linked)."""
        new = [c for c in extra if c.key not in self.index]
        new = list({c.key: c for c in new}.values())
        if not new:
            return self
        ball = CylGraphBall(self.surface, self.r2, self.include_degenerates, self.directions,
                            self.skipped, self.vertices + new)
        for i in range(self.n):
            ball.adj[i] = set(self.adj[i])
        S = self.surface
        for j in range(self.n, ball.n):
            for i in range(j):
                if disjoint(S, ball.vertices[i], ball.vertices[j]):
                    ball.add_edge(i, j)
        return ball

    def recheck(self) -> bool:
        """Every edge has intersection number 0 (exact recount)."""
        S = self.surface
        return all(intersection_number(S, self.vertices[i], self.vertices[j]) == 0
                   for i, j in self.edges())

    def vertex_label(self, i: int) -> str:
        c = self.vertices[i]
        kind = "degenerate" if c.degenerate else ("simple" if c.simple else "cylinder")
        return f"dir ({c.d.x.label()}, {c.d.y.label()}) {kind} circ^2={c.circumference2.label()}"

    def to_json(self, centers=()) -> dict:
        out = {
            "schema": SCHEMA,
            "r2": self.r2.to_json(),
            "include_degenerates": self.include_degenerates,
            "directions": [d.vector.to_json() for d in self.directions],
            "skipped_directions": [d.vector.to_json() for d in self.skipped],
            "vertices": [
                {
                    "id": i,
                    "direction": c.d.to_json(),
                    "kind": "degenerate" if c.degenerate else "nondegenerate",
                    "simple": c.simple,
                    "circumference2": c.circumference2.label(),
                }
                for i, c in enumerate(self.vertices)
            ],
            "edges": [list(e) for e in self.edges()],
            "distance_kind": DISTANCE_KIND,
        }
        if centers:
            out["distances"] = {str(i): {str(k): v for k, v in sorted(self.bfs(i).items())}
                                for i in centers}
        return out

    def to_dot(self, name: str = "ball") -> str:
        lines = [f'graph "{name}" {{', f'  label="cylinder graph ball, r^2={self.r2.label()}, '
                                          f'distances are {DISTANCE_KIND}s";']
        for i in range(self.n):
            lines.append(f'  v{i} [label="{self.vertex_label(i)}"];')
        for i, j in self.edges():
            lines.append(f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(S: Surface, r2, include_degenerates: bool = True,
               budget: int = DEFAULT_BUDGET) -> CylGraphBall:
    """Ball of the cylinder graph spanned by short saddle directions."""
    r2 = as_fe(r2)
    cache = S.cached("balls", dict)
    key = (r2, include_degenerates, budget)
    if key in cache:
        return cache[key]
    directions, skipped, vertices = [], [], []
    if r2.sign() > 0:
        for dr in saddle_directions(S, r2):
            dec = cylinder_decomposition(S, dr, budget)
            if not dec.periodic:
                skipped.append(dr)
                continue
            directions.append(dr)
            vertices.extend(dec.cylinders)
            if include_degenerates:
                vertices.extend(dec.degenerates)
    ball = CylGraphBall(S, r2, include_degenerates, directions, skipped, vertices)
    ball._link_all()
    cache[key] = ball
    return ball


def find_triangle(ball: Graph):
    """Three pairwise adjacent vertices, or None.  For a cylinder ball the
    cylinders themselves are returned."""
    for i in range(ball.n):
        for j in sorted(ball.adj[i]):
            if j <= i:
                continue
            common = [k for k in ball.adj[i] & ball.adj[j] if k > j]
            if common:
                tri = (i, j, min(common))
                if isinstance(ball, CylGraphBall):
                    return tuple(ball.vertices[k] for k in tri)
                return tri
    return None


# ------------------------------------------------------------------ paths


class PathResult(NamedTuple):
    path: list
    iota: int
    bound: int
    ok: bool
    r2: FieldElement | None

    @property
    def length(self) -> int:
        return len(self.path) - 1

    def to_json(self) -> dict:
        return {"iota": self.iota, "pathLen": self.length, "bound": self.bound, "ok": self.ok}


def _certify(S, path, iota):
    bound = K1 * iota + K2
    edges_ok = all(intersection_number(S, a, b) == 0 for a, b in zip(path, path[1:]))
    return bound, edges_ok and len(path) - 1 <= bound


def connect_path(S: Surface, C: Cylinder, D: Cylinder, budget=None, start_r2=None) -> PathResult:
    """A path of pairwise disjoint consecutive cylinders from C to D of
    length at most ``3*iota(C, D) + 6``.

    The path is a shortest path in balls of growing radius (``budget`` is
    the largest ``r^2`` tried; default ``64 * area``).  Every edge is
    re-certified with the exact intersection number.
    """
    if C.key == D.key:
        raise PreconditionFailed("endpoints coincide")
    iota = intersection_number(S, C, D)
    if iota == 0:
        bound, ok = _certify(S, [C, D], 0)
        return PathResult([C, D], 0, bound, ok, None)
    if C.direction == D.direction:
        # two parallel degenerate cylinders sharing a saddle connection
        E = C.decomposition.cylinders[0]
        path = [C, E, D]
        bound, ok = _certify(S, path, iota)
        return PathResult(path, iota, bound, ok, None)
    limit = as_fe(budget) if budget is not None else S.area * 64
    r2 = as_fe(start_r2) if start_r2 is not None else S.area
    bound = K1 * iota + K2
    while True:
        ball = build_ball(S, r2).with_vertices([C, D])
        p = ball.shortest_path(ball.index[C.key], ball.index[D.key])
        if p is not None and len(p) - 1 <= bound:
            path = [ball.vertices[i] for i in p]
            _, ok = _certify(S, path, iota)
            return PathResult(path, iota, bound, ok, r2)
        if r2 >= limit:
            raise BudgetExceeded(f"no path of length <= {bound} within r^2 <= {limit}")
        r2 = min(r2 * 2, limit)


def path_certificate(results) -> dict:
    return {"schema": SCHEMA, "pairs": [r.to_json() for r in results],
            "ok": all(r.ok for r in results)}


# ------------------------------------------------------------------ slices


class SliceSet(NamedTuple):
    """Cylinders short on the diagonal flow orbit normalising (C, D).

    ``members[k]`` lists the cylinders whose area-normalised squared
    length at time ``t = k*ln(2)/2`` is at most ``r2``.
    """
    center: tuple
    r2: FieldElement
    ks: list
    members: dict
    ball: CylGraphBall


def _normalised_frame(C: Cylinder, D: Cylinder):
    c, d = C.holonomy, D.holonomy
    w = wedge(c, d)
    if not w:
        raise PreconditionFailed("slices need non-parallel cylinders")
    if w.sign() < 0:
        d, w = -d, -w
    return c, d, w


def time_length2(S: Surface, C: Cylinder, D: Cylinder, h, k: int) -> FieldElement:
    """Squared length of holonomy h at time k*ln(2)/2 after making C
    horizontal and D vertical with equal circumference, for area one."""
    c, d, w = _normalised_frame(C, D)
    x2 = wedge(h, d) ** 2
    y2 = wedge(c, h) ** 2
    f = Fraction(2) ** k
    return (x2 * f + y2 / f) / (w * S.area)


def slice_set(S: Surface, C: Cylinder, D: Cylinder, r2, ks) -> SliceSet:
    """Cylinders of normalised circumference at most sqrt(r2) at each
    time of the grid ``t = k*ln(2)/2``, ``k`` in ``ks``."""
    r2 = as_fe(r2)
    ks = sorted(set(int(k) for k in ks))
    c, d, w = _normalised_frame(C, D)
    if not ks:
        return SliceSet((C, D), r2, [], {}, build_ball(S, 0))
    # |h|^2 <= 2 (a|c|^2 + b|d|^2) / w with a, b the bounds on the two
    # normalised coordinates
    big = max(2 * r2 * S.area * (dot(c, c) / Fraction(2) ** k + dot(d, d) * Fraction(2) ** k) / w
              for k in ks)
    ball = build_ball(S, big).with_vertices([C, D])
    members = {}
    for k in ks:
        members[k] = [v for v in ball.vertices
                      if time_length2(S, C, D, v.holonomy, k) <= r2]
    return SliceSet((C, D), r2, ks, members, ball)


def guideline_diameter_report(sl: SliceSet, K=DEFAULT_K, L1=None) -> dict:
    """Measured slice diameters against ``M1 = max(2(2 K1 L1 / K + K2), 2)``."""
    K = Fraction(K)
    if L1 is None:
        L1 = max(1 / K, Fraction(9)) + 1
    L1 = Fraction(L1)
    M1 = max(2 * (2 * K1 * L1 / K + K2), Fraction(2))
    ball = sl.ball
    table = {}
    rows = []
    for k in sl.ks:
        idx = [ball.index[v.key] for v in sl.members[k]]
        diam = 0
        for i in idx:
            if i not in table:
                table[i] = ball.bfs(i)
            for j in idx:
                dist = table[i].get(j)
                if dist is None:
                    diam = None
                    break
                diam = max(diam, dist)
            if diam is None:
                break
        rows.append({"k": k, "size": len(idx), "diameter": diam,
                     "within": diam is not None and diam <= M1})
    return {
        "schema": SCHEMA,
        "K": str(K), "K1": K1, "K2": K2, "L1": str(L1), "M1": str(M1),
        "r2": sl.r2.label(),
        "distance_kind": DISTANCE_KIND,
        "slices": rows,
        "ok": all(r["within"] for r in rows),
    }


# ------------------------------------------------------------ hyperbolicity


def _four_point(dist, x, y, z, w) -> Fraction:
    s = sorted((dist[x][y] + dist[z][w], dist[x][z] + dist[y][w], dist[x][w] + dist[y][z]))
    return Fraction(s[2] - s[1], 2)


def estimate_hyperbolicity(ball: Graph, samples: int = 20000, seed: int = 0) -> Fraction:
    """Largest four-point defect over all 4-tuples, or over ``samples``
    seeded random 4-tuples when there are more than that."""
    if not ball.connected():
        raise DisconnectedBall("four-point estimates need a connected ball")
    n = ball.n
    if n < 4:
        return Fraction(0)
    dist = ball.distance_table()
    total = n * (n - 1) * (n - 2) * (n - 3) // 24
    best = Fraction(0)
    if total <= samples:
        quads = combinations(range(n), 4)
    else:
        rng = random.Random(seed)
        quads = (rng.sample(range(n), 4) for _ in range(samples))
    for q in quads:
        best = max(best, _four_point(dist, *q))
    return best
