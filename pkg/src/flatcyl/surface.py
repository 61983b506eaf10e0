"""Translation surfaces given by polygons glued along parallel edges.

A :class:`Surface` is immutable.  On construction the polygons are cut into
triangles (corners with angle exactly pi are kept, so the cut is always
possible), the corners are grouped into vertex classes, and cone angles are
counted exactly.  The triangulation is what the straight-line tracer walks.

Builders for the standard families live at the bottom of the module, next
to the JSON reader and writer.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import NamedTuple

from .errors import (
    BadConeAngle,
    DegenerateLattice,
    InputError,
    InvalidPrototype,
    MismatchedEdge,
    NonConvexPolygon,
    NotConnected,
    SlitThroughLatticePoint,
    WrongGenus,
)
from .exactnum import ONE, ZERO, FieldElement, Vec2, as_fe, dot, wedge

__all__ = [
    "Surface",
    "Germ",
    "TraceHit",
    "TraceStop",
    "TraceExceeded",
    "build_from_polygons",
    "build_square_tiled",
    "build_prototype_surface",
    "build_slit_torus",
    "build_regular_octagon",
    "six_square_surface",
    "one_cylinder_origami",
    "parse_permutation",
    "surface_to_json",
    "surface_from_json",
]

SCHEMA = 1
DEFAULT_BUDGET = 10_000


class Germ(NamedTuple):
    """An outgoing direction at a vertex class.

    ``corner`` indexes the class's cyclic (counterclockwise) corner list;
    ``vec`` lies in the half-open sector of that corner.
    """

    vclass: int
    corner: int
    vec: Vec2


class TraceHit(NamedTuple):
    vclass: int
    arrival: Germ  # germ pointing back along the ray
    holonomy: Vec2
    segments: list  # (tri, p_in, p_out) in local triangle coordinates
    steps: int


class TraceStop(NamedTuple):
    tri: int
    point: Vec2  # local coordinates in ``tri``
    holonomy: Vec2
    segments: list
    steps: int


class TraceExceeded(NamedTuple):
    steps: int


def in_sector(s: Vec2, e: Vec2, u: Vec2) -> bool:
    """u in the half-open sector [s, e) of opening angle < pi."""
    ws = wedge(s, u).sign()
    if ws == 0:
        return dot(s, u).sign() > 0
    return ws > 0 and wedge(u, e).sign() > 0


def _point_in_closed_triangle(p, a, b, c) -> bool:
    return (
        wedge(b - a, p - a).sign() >= 0
        and wedge(c - b, p - b).sign() >= 0
        and wedge(a - c, p - c).sign() >= 0
    )


def ear_clip(pts: list[Vec2]) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon; collinear corners are allowed."""
    idx = list(range(len(pts)))
    tris = []
    guard = 0
    while len(idx) > 3:
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = pts[i0], pts[i1], pts[i2]
            if wedge(b - a, c - b).sign() <= 0:
                continue
            if any(
                _point_in_closed_triangle(pts[j], a, b, c)
                for j in idx
                if j not in (i0, i1, i2)
            ):
                continue
            tris.append((i0, i1, i2))
            idx.pop(k)
            break
        else:
            raise NonConvexPolygon("polygon cannot be triangulated (not simple or wrong orientation)")
        guard += 1
    tris.append(tuple(idx))
    return tris


class Surface:
    """A translation surface built from CCW polygons and edge gluings.

    Parameters
    ----------
    polygons : list of vertex lists (``Vec2`` or pairs of numbers)
    gluings : iterable of ``(p, i, q, j)``; edge i of polygon p (from vertex
        i to vertex i+1) is glued to edge j of polygon q.
    mode : ``"genus2"`` (default) requires genus 2, ``"torus"`` genus 1,
        ``"any"`` accepts every genus.
    marked : corners ``(p, i)`` whose vertex classes are treated as
        singular even if their angle is 2*pi.
    allow_nonconvex : accept simple non-convex polygons.
    """

    def __init__(self, polygons, gluings, mode="genus2", marked=(), meta=None, allow_nonconvex=False):
        self.polygons = [tuple(_vec(v) for v in poly) for poly in polygons]
        self.mode = mode
        self.meta = dict(meta or {})
        self._cache = {}
        self.disc = self._field_disc()
        self._check_polygons(allow_nonconvex)
        self.gluings = self._check_gluings(gluings)
        self._triangulate()
        self._vertex_classes()
        self._angles_and_genus()
        self.marked_corners = tuple(tuple(m) for m in marked)
        marked_classes = {self.poly_corner_class(p, i) for p, i in self.marked_corners}
        self.marked = sorted(marked_classes - set(self.zeros))
        self.singular = sorted(set(self.zeros) | marked_classes)
        self._singular_set = frozenset(self.singular)
        self._check_mode()

    # ------------------------------------------------------------------ setup

    def _field_disc(self) -> int:
        d = 0
        for poly in self.polygons:
            for v in poly:
                for c in (v.x, v.y):
                    if c.b:
                        if d and c.disc != d:
                            raise InputError("coordinates from two different quadratic fields")
                        d = c.disc
        return d

    def _check_polygons(self, allow_nonconvex):
        for p, poly in enumerate(self.polygons):
            n = len(poly)
            if n < 3:
                raise NonConvexPolygon(f"polygon {p} has fewer than 3 vertices")
            area2 = sum((wedge(poly[i], poly[(i + 1) % n]) for i in range(n)), ZERO)
            if area2.sign() <= 0:
                raise NonConvexPolygon(f"polygon {p} is not counterclockwise")
            for i in range(n):
                e0 = poly[i] - poly[i - 1]
                e1 = poly[(i + 1) % n] - poly[i]
                if e1.is_zero():
                    raise NonConvexPolygon(f"polygon {p} has a repeated vertex")
                turn = wedge(e0, e1).sign()
                if turn < 0 and not allow_nonconvex:
                    raise NonConvexPolygon(f"polygon {p} is not convex at vertex {i}")
                if turn == 0 and dot(e0, e1).sign() < 0:
                    raise NonConvexPolygon(f"polygon {p} folds back at vertex {i}")

    def _check_gluings(self, gluings):
        seen = {}
        for g in gluings:
            p, i, q, j = (int(x) for x in g)
            for poly, edge in ((p, i), (q, j)):
                if not (0 <= poly < len(self.polygons)) or not (0 <= edge < len(self.polygons[poly])):
                    raise MismatchedEdge(f"edge ({poly}, {edge}) does not exist")
            if (p, i) == (q, j):
                raise MismatchedEdge(f"edge ({p}, {i}) glued to itself")
            for a, b in (((p, i), (q, j)), ((q, j), (p, i))):
                if a in seen and seen[a] != b:
                    raise MismatchedEdge(f"edge {a} glued twice")
                seen[a] = b
            if self.edge_vector(p, i) != -self.edge_vector(q, j):
                raise MismatchedEdge(f"edges ({p}, {i}) and ({q}, {j}) are not opposite translates")
        for p, poly in enumerate(self.polygons):
            for i in range(len(poly)):
                if (p, i) not in seen:
                    raise MismatchedEdge(f"edge ({p}, {i}) is not glued")
        pairs = sorted({tuple(sorted((a, b))) for a, b in seen.items()})
        return tuple((a[0], a[1], b[0], b[1]) for a, b in pairs)

    def edge_vector(self, p: int, i: int) -> Vec2:
        poly = self.polygons[p]
        return poly[(i + 1) % len(poly)] - poly[i]

    def _triangulate(self):
        tri_pts, tri_src = [], []
        edge_owner = {}  # polygon edge -> (tri, edge)
        diag = {}
        for p, poly in enumerate(self.polygons):
            n = len(poly)
            for tri in ear_clip(list(poly)):
                t = len(tri_pts)
                tri_pts.append(tuple(poly[k] for k in tri))
                tri_src.append((p, tri))
                for k in range(3):
                    u, v = tri[k], tri[(k + 1) % 3]
                    if v == (u + 1) % n:
                        edge_owner[(p, u)] = (t, k)
                    else:
                        diag[(p, u, v)] = (t, k)
        glue = [[None] * 3 for _ in tri_pts]
        for (p, u, v), (t, k) in diag.items():
            t2, k2 = diag[(p, v, u)]
            glue[t][k] = (t2, k2)
        for p, i, q, j in self.gluings:
            t, k = edge_owner[(p, i)]
            t2, k2 = edge_owner[(q, j)]
            glue[t][k] = (t2, k2)
            glue[t2][k2] = (t, k)
        self.tri_pts = tuple(tri_pts)
        self.tri_src = tuple(tri_src)
        self.tri_glue = tuple(tuple(g) for g in glue)
        self.poly_edge_tri = edge_owner
        self.tri_edges = tuple(
            tuple(pts[(k + 1) % 3] - pts[k] for k in range(3)) for pts in self.tri_pts
        )

    def next_corner(self, t: int, i: int) -> tuple[int, int]:
        """The corner counterclockwise after (t, i) at the same vertex."""
        return self.tri_glue[t][(i - 1) % 3]

    def _vertex_classes(self):
        corner_class = [[None] * 3 for _ in self.tri_pts]
        classes = []
        for t in range(len(self.tri_pts)):
            for i in range(3):
                if corner_class[t][i] is not None:
                    continue
                c = len(classes)
                cyc = []
                cur = (t, i)
                while corner_class[cur[0]][cur[1]] is None:
                    corner_class[cur[0]][cur[1]] = c
                    cyc.append(cur)
                    cur = self.next_corner(*cur)
                classes.append(tuple(cyc))
        self.corner_class = tuple(tuple(r) for r in corner_class)
        self.class_corners = tuple(classes)
        self.corner_pos = {}
        for c, cyc in enumerate(classes):
            for k, cn in enumerate(cyc):
                self.corner_pos[cn] = (c, k)
        # connectivity of the triangle adjacency graph
        seen, stack = {0}, [0]
        while stack:
            t = stack.pop()
            for t2, _ in self.tri_glue[t]:
                if t2 not in seen:
                    seen.add(t2)
                    stack.append(t2)
        if len(seen) != len(self.tri_pts):
            raise NotConnected("the gluing graph is disconnected")

    def corner_sector(self, t: int, i: int) -> tuple[Vec2, Vec2]:
        e = self.tri_edges[t]
        return e[i], -e[(i - 1) % 3]

    def _angles_and_genus(self):
        xp, xm = Vec2(1, 0), Vec2(-1, 0)
        angles = []
        for cyc in self.class_corners:
            n = 0
            for t, i in cyc:
                s, e = self.corner_sector(t, i)
                n += in_sector(s, e, xp) + in_sector(s, e, xm)
            if n < 2 or n % 2:
                raise BadConeAngle(f"cone angle {n}π is not a positive multiple of 2π")
            angles.append(n)
        self.cone_angles = tuple(angles)  # in units of pi
        euler = sum(n // 2 - 1 for n in angles)
        if euler % 2:
            raise BadConeAngle("angle excess is not even")
        self.genus = euler // 2 + 1
        self.zeros = tuple(c for c, n in enumerate(angles) if n > 2)
        self.area = sum(
            (wedge(b - a, c - a) for a, b, c in self.tri_pts), ZERO
        ) / 2

    def _check_mode(self):
        if self.mode == "genus2" and self.genus != 2:
            raise WrongGenus(f"genus {self.genus}, expected 2")
        if self.mode == "torus" and self.genus != 1:
            raise WrongGenus(f"genus {self.genus}, expected 1")

    # ------------------------------------------------------------- queries

    @property
    def stratum(self) -> str:
        orders = sorted((self.cone_angles[z] // 2 - 1 for z in self.zeros), reverse=True)
        if not orders:
            return "H(" + ",".join("0" for _ in self.marked) + ")" if self.marked else "H(0)"
        return "H(" + ",".join(str(o) for o in orders) + ")"

    def is_singular(self, c: int) -> bool:
        return c in self._singular_set

    def poly_corner_class(self, p: int, i: int) -> int:
        """Vertex class of corner i of polygon p."""
        poly_n = len(self.polygons[p])
        t, k = self.poly_edge_tri[(p, i % poly_n)]
        return self.corner_class[t][k]

    def cone_angle_pi(self, c: int) -> int:
        return self.cone_angles[c]

    def __repr__(self):
        return f"<Surface {self.stratum} genus={self.genus} polygons={len(self.polygons)} area={self.area}>"

    # ------------------------------------------------------------ germs

    def corner_germ_index(self, c: int, u: Vec2, start: int = 0) -> int:
        """Index of the corner of class c containing direction u.

        The search walks counterclockwise from ``start``.  At a regular
        point the answer is unique.
        """
        cyc = self.class_corners[c]
        n = len(cyc)
        for step in range(n):
            k = (start + step) % n
            s, e = self.corner_sector(*cyc[k])
            if in_sector(s, e, u):
                return k
        raise ValueError("direction not found at vertex")

    def germs_in_direction(self, c: int, u: Vec2) -> list[Germ]:
        """All germs of direction u at class c, in counterclockwise order."""
        out = []
        for k, (t, i) in enumerate(self.class_corners[c]):
            s, e = self.corner_sector(t, i)
            if in_sector(s, e, u):
                out.append(Germ(c, k, u))
        return out

    def germ_cmp(self, g: Germ, h: Germ) -> int:
        if g.corner != h.corner:
            return -1 if g.corner < h.corner else 1
        w = wedge(g.vec, h.vec).sign()
        return -w

    def germ_key(self):
        return cmp_to_key(self.germ_cmp)

    def same_germ(self, g: Germ, h: Germ) -> bool:
        return (
            g.vclass == h.vclass
            and g.corner == h.corner
            and not wedge(g.vec, h.vec)
            and dot(g.vec, h.vec).sign() > 0
        )

    def germ_sector_walk(self, g: Germ, u: Vec2) -> Germ:
        """The first germ of direction u reached counterclockwise from g
        (strictly after g when u is parallel to g.vec and equal in sense)."""
        cyc = self.class_corners[g.vclass]
        n = len(cyc)
        t, i = cyc[g.corner]
        s, e = self.corner_sector(t, i)
        if in_sector(s, e, u) and wedge(g.vec, u).sign() > 0:
            return Germ(g.vclass, g.corner, u)
        for step in range(1, n + 1):
            k = (g.corner + step) % n
            s, e = self.corner_sector(*cyc[k])
            if in_sector(s, e, u):
                if step == n and wedge(g.vec, u).sign() > 0:
                    continue
                return Germ(g.vclass, k, u)
        raise ValueError("direction not found at vertex")

    def germ_rotate_pi(self, g: Germ, times: int = 1) -> Germ:
        """Rotate a germ counterclockwise by times*pi."""
        u = g.vec
        for _ in range(times):
            g = self.germ_sector_walk(g, -g.vec)
        return g

    def germ_half_turns(self, g: Germ, h: Germ) -> int:
        """Number of counterclockwise half turns from g to h (h = ±g.vec)."""
        if wedge(g.vec, h.vec):
            raise ValueError("germs are not parallel")
        n = 0
        cur = g
        total = self.cone_angles[g.vclass]
        while True:
            if self.same_germ(cur, h):
                return n
            cur = self.germ_sector_walk(cur, -cur.vec)
            n += 1
            if n > total:
                raise ValueError("germ not reachable")

    # ------------------------------------------------------------ tracing

    def trace(self, start, d: Vec2, budget: int = DEFAULT_BUDGET, s_max=None, record=False, visit=None):
        """Follow the straight ray of direction d.

        ``start`` is a :class:`Germ` (the ray leaves a vertex) or a pair
        ``(tri, local_point)``.  The ray is ``O + s*d``; with ``s_max`` it
        stops at that parameter.  Regular vertices that are not marked are
        crossed straight.  Returns TraceHit, TraceStop or TraceExceeded.

        ``visit(tri, p_in, p_out, off)`` is called for every piece of the
        ray (local coordinates; developed = local + off).  A non-None return
        value ends the trace and is returned as is.
        """
        pts_all, glue, edges_all = self.tri_pts, self.tri_glue, self.tri_edges
        segs = [] if record else None
        if isinstance(start, Germ):
            t, k = self.class_corners[start.vclass][start.corner]
            mode, entry = 1, k
            off = Vec2._raw(ZERO, ZERO)
            origin = pts_all[t][k]
        else:
            t, p = start
            mode, entry = 2, None
            off = Vec2._raw(ZERO, ZERO)
            origin = p
            if p in pts_all[t]:
                # starting on a vertex: it must be regular; leave through the
                # corner that contains d
                c = self.corner_class[t][pts_all[t].index(p)]
                if c in self._singular_set:
                    raise ValueError("start point is a singular vertex; pass a Germ")
                t, entry = self.class_corners[c][self.corner_germ_index(c, d)]
                off = p - pts_all[t][entry]
                mode = 1
        cur = origin  # developed entry point, for recording
        dd = None
        steps = 0
        while True:
            pts = pts_all[t]
            hit = None
            exit_edge = None
            if mode == 0:
                i = entry
                c = pts[(i + 2) % 3] + off
                sc = wedge(d, c - origin).sign()
                if sc == 0:
                    hit = (i + 2) % 3
                elif sc > 0:
                    exit_edge = (i + 1) % 3
                else:
                    exit_edge = (i + 2) % 3
            elif mode == 1:
                k = entry
                e = edges_all[t][k]
                if not wedge(e, d) and dot(e, d).sign() > 0:
                    hit = (k + 1) % 3
                else:
                    exit_edge = (k + 1) % 3
            else:
                w = [pts[j] + off for j in range(3)]
                sides = [wedge(d, w[j] - origin).sign() for j in range(3)]
                for j in range(3):
                    if sides[j] == 0 and dot(d, w[j] - origin).sign() > 0:
                        hit = j
                        break
                if hit is None:
                    for j in range(3):
                        if sides[j] < 0 < sides[(j + 1) % 3]:
                            exit_edge = j
                            break
                    if exit_edge is None:
                        raise ValueError("start point is not inside the given triangle")
            if s_max is not None or record or visit is not None:
                if dd is None:
                    dd = dot(d, d)
                if hit is not None:
                    wv = pts[hit] + off
                    s_end = dot(wv - origin, d) / dd
                else:
                    ej = edges_all[t][exit_edge]
                    s_end = wedge(pts[exit_edge] + off - origin, ej) / wedge(d, ej)
                if s_max is not None and s_max < s_end:
                    endp = origin + d * s_max
                    if record:
                        segs.append((t, cur - off, endp - off))
                    if visit is not None:
                        r = visit(t, cur - off, endp - off, off)
                        if r is not None:
                            return r
                    return TraceStop(t, endp - off, endp - origin, segs, steps)
                endp = (pts[hit] + off) if hit is not None else origin + d * s_end
                if record:
                    segs.append((t, cur - off, endp - off))
                if visit is not None:
                    r = visit(t, cur - off, endp - off, off)
                    if r is not None:
                        return r
                cur = endp
            if hit is not None:
                c = self.corner_class[t][hit]
                wv = pts[hit] + off
                if c in self._singular_set:
                    back = -d
                    s, e = self.corner_sector(t, hit)
                    cn = (t, hit)
                    if not wedge(back, e) and dot(back, e).sign() > 0:
                        cn = self.next_corner(t, hit)
                    k = self.corner_pos[cn][1]
                    return TraceHit(c, Germ(c, k, back), wv - origin, segs, steps)
                k = self.corner_germ_index(c, d)
                t, entry = self.class_corners[c][k]
                off = wv - pts_all[t][entry]
                mode = 1
            else:
                t2, j2 = glue[t][exit_edge]
                off = pts[(exit_edge + 1) % 3] + off - pts_all[t2][j2]
                t, entry, mode = t2, j2, 0
            steps += 1
            if steps > budget:
                return TraceExceeded(steps)

    def locate(self, p: int, point) -> tuple[int, Vec2]:
        """Triangle containing a point given in polygon p's coordinates."""
        point = _vec(point)
        for t, (pp, _) in enumerate(self.tri_src):
            if pp == p and _point_in_closed_triangle(point, *self.tri_pts[t]):
                return t, point
        raise ValueError("point is outside the polygon")

    # -------------------------------------------------------- transforms

    def transformed(self, m) -> "Surface":
        """Image under the linear map m = ((a, b), (c, d)) with det > 0."""
        (a, b), (c, d) = m
        a, b, c, d = (as_fe(x) for x in (a, b, c, d))
        if (a * d - b * c).sign() <= 0:
            raise InputError("matrix must have positive determinant")
        mm = ((a, b), (c, d))
        polys = [[v.apply(mm) for v in poly] for poly in self.polygons]
        meta = dict(self.meta)
        meta["transformed"] = True
        return Surface(polys, self.gluings, mode=self.mode, marked=self.marked_corners, meta=meta,
                       allow_nonconvex=True)

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]


def _vec(v) -> Vec2:
    if isinstance(v, Vec2):
        return v
    x, y = v
    return Vec2(as_fe(x), as_fe(y))


# ----------------------------------------------------------------- builders


def build_from_polygons(data, mode="genus2") -> Surface:
    """Build from a dict ``{"polygons": ..., "gluings": ..., "marked": ...}``."""
    if isinstance(data, dict):
        return Surface(
            data["polygons"], data["gluings"], mode=data.get("mode", mode),
            marked=data.get("marked", ()), meta=data.get("meta"),
        )
    polygons, gluings = data
    return Surface(polygons, gluings, mode=mode)


def parse_permutation(spec, n=None) -> list[int]:
    """Parse a permutation of {1..n}: cycle string "(1,2,3)(4)", list or dict.

    Returns a 0-based image list.
    """
    if isinstance(spec, dict):
        n = max(max(spec), max(spec.values()), n or 0)
        img = list(range(n))
        for k, v in spec.items():
            img[k - 1] = v - 1
        return _check_perm(img)
    if isinstance(spec, (list, tuple)):
        return _check_perm([int(v) - 1 for v in spec])
    s = str(spec).replace(" ", "")
    cycles = []
    for part in s.split(")"):
        part = part.strip("(")
        if not part:
            continue
        sep = "," if "," in part else None
        items = part.split(sep) if sep else list(part)
        cycles.append([int(x) for x in items])
    m = max([n or 0] + [x for cyc in cycles for x in cyc])
    img = list(range(m))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a - 1] = b - 1
    return _check_perm(img)


def _check_perm(img):
    if sorted(img) != list(range(len(img))):
        raise InputError("not a permutation")
    return img


def build_square_tiled(h_perm, v_perm, mode="any", marked=()) -> Surface:
    """Unit squares; square i has right neighbour h(i) and top neighbour v(i)."""
    h = parse_permutation(h_perm)
    v = parse_permutation(v_perm)
    n = max(len(h), len(v))
    h += list(range(len(h), n))
    v += list(range(len(v), n))
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    gl = []
    for i in range(n):
        gl.append((i, 1, h[i], 3))
        gl.append((i, 2, v[i], 0))
    # connectivity of the joint action
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for j in (h[i], v[i], h.index(i), v.index(i)):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != n:
        raise NotConnected("permutations do not act transitively")
    meta = {"kind": "square_tiled", "h": [x + 1 for x in h], "v": [x + 1 for x in v]}
    return Surface([square] * n, gl, mode=mode, marked=marked, meta=meta)


def one_cylinder_origami(n: int) -> Surface:
    """n squares in one horizontal row; tops glued by the reversal.

    n = 3 lies in H(2) and n = 4 in H(1,1), each with a single horizontal
    cylinder.
    """
    if n not in (3, 4):
        raise InputError("only the 3- and 4-square one-cylinder origamis are provided")
    h = "(" + ",".join(str(i) for i in range(1, n + 1)) + ")"
    v = "(1)(2,3)" if n == 3 else "(1,2)(3,4)"
    return build_square_tiled(h, v, mode="genus2")


# Reference gluing for the six-square surface in H(1,1).  Squares are unit
# squares placed at (col, row): 1 at (0,2); 2,3,4 at (0,1),(1,1),(2,1);
# 5,6 at (1,0),(2,0).  Horizontal cylinders: {1} (length 1), {5,6}
# (length 2), {2,3,4} (length 3).  Vertical cylinders: the column {1,2}
# and the 2x2 block {3,4,5,6}.
SIX_SQUARE_H = "(1)(2,3,4)(5,6)"
SIX_SQUARE_V = "(1,2)(3,5)(4,6)"


def six_square_surface() -> Surface:
    s = build_square_tiled(SIX_SQUARE_H, SIX_SQUARE_V, mode="genus2")
    s.meta["kind"] = "six_square"
    return s


def _prototype_ok(a, b, c, e) -> bool:
    g = gcd(b, c)
    return (
        b > 0 and c > 0 and 0 <= a < g and b > c + e and gcd(gcd(a, b), gcd(c, e)) == 1
    )


def prototype_lambda(b: int, c: int, e: int) -> FieldElement:
    d = e * e + 4 * b * c
    return FieldElement(e, 1, 2, d)


def build_prototype_surface(proto) -> Surface:
    """Two-cylinder surface of a prototype (a, b, c, e).

    A lambda x lambda square sits on top of the parallelogram spanned by
    (b, 0) and (a, c), over the top segment [a, a + lambda].
    """
    a, b, c, e = (int(x) for x in (proto.a, proto.b, proto.c, proto.e)) if hasattr(proto, "a") else proto
    if not _prototype_ok(a, b, c, e):
        raise InvalidPrototype(f"({a},{b},{c},{e}) violates the prototype conditions")
    D = e * e + 4 * b * c
    lam = prototype_lambda(b, c, e)
    z = ZERO
    square = [Vec2(z, z), Vec2(lam, z), Vec2(lam, lam), Vec2(z, lam)]
    A, B, C = as_fe(a), as_fe(b), as_fe(c)
    para = [
        Vec2(z, z), Vec2(lam, z), Vec2(B, z), Vec2(A + B, C), Vec2(A + lam, C), Vec2(A, C),
    ]
    gl = [(0, 0, 1, 4), (0, 2, 1, 0), (0, 1, 0, 3), (1, 1, 1, 3), (1, 2, 1, 5)]
    meta = {"kind": "prototype", "prototype": [a, b, c, e], "D": D}
    return Surface([square, para], gl, mode="genus2", meta=meta)


def build_regular_octagon() -> Surface:
    """Regular octagon with unit sides, opposite sides glued (H(2))."""
    h = FieldElement(0, 1, 2, 2)  # sqrt(2)/2
    z, one = ZERO, ONE
    pts = [
        Vec2(z, z), Vec2(one, z), Vec2(one + h, h), Vec2(one + h, one + h),
        Vec2(one, one + h + h), Vec2(z, one + h + h), Vec2(-h, one + h), Vec2(-h, h),
    ]
    gl = [(0, i, 0, i + 4) for i in range(4)]
    return Surface([pts], gl, mode="genus2", meta={"kind": "octagon"})


def build_slit_torus(lattice, slit, t=1) -> Surface:
    """Torus R^2/(Z v1 + Z v2) with marked points 0 and u = t*slit.

    The straight segment from 0 to u is the slit; it is recorded in
    ``meta["slit"]``.  The surface is cut into four triangles around the
    second marked point.
    """
    v1, v2 = _vec(lattice[0]), _vec(lattice[1])
    u = _vec(slit) * as_fe(t)
    det = wedge(v1, v2)
    if not det:
        raise DegenerateLattice("lattice vectors are parallel")
    if u.is_zero():
        raise SlitThroughLatticePoint("slit has zero length")
    if det.sign() < 0:
        v1, v2 = v2, v1
        det = -det
    c1 = wedge(u, v2) / det
    c2 = wedge(v1, u) / det
    _check_slit_embedded(c1, c2)
    b1, b2 = c1 - c1.floor(), c2 - c2.floor()
    w1, w2 = v1, v2
    if not b2:
        w1 = v1 + v2
        b1, b2 = b1, ONE - b1
    elif not b1:
        w2 = v1 + v2
        b1, b2 = ONE - b2, b2
    p = w1 * b1 + w2 * b2
    o = Vec2._raw(ZERO, ZERO)
    tris = [[o, w1, p], [w1, w1 + w2, p], [w1 + w2, w2, p], [w2, o, p]]
    gl = [(0, 0, 2, 0), (1, 0, 3, 0), (0, 1, 1, 2), (1, 1, 2, 2), (2, 1, 3, 2), (3, 1, 0, 2)]
    meta = {
        "kind": "slit_torus",
        "lattice": [v1, v2],
        "slit": u,
    }
    return Surface(tris, gl, mode="torus", marked=[(0, 0), (0, 2)], meta=meta)


def _check_slit_embedded(c1: FieldElement, c2: FieldElement):
    """Reject slits whose closed segment meets a lattice point besides 0."""
    if not c1 and not c2:
        raise SlitThroughLatticePoint("zero slit")
    if not c1:
        r = abs(c2)
    elif not c2:
        r = abs(c1)
    else:
        q = c2 / c1
        if q.b:
            return
        fq = q.to_fraction()
        m, n = fq.denominator, fq.numerator
        r = abs(c1 / m)
    if r >= 1:
        raise SlitThroughLatticePoint("slit meets a lattice point")


# ---------------------------------------------------------------- JSON


def surface_to_json(s: Surface) -> dict:
    out = {
        "schema": SCHEMA,
        "disc": s.disc,
        "mode": s.mode,
        "polygons": [[v.to_json() for v in poly] for poly in s.polygons],
        "gluings": [list(g) for g in s.gluings],
    }
    if s.marked_corners:
        out["marked"] = [list(m) for m in s.marked_corners]
    meta = {k: v for k, v in s.meta.items() if isinstance(v, (int, str, list)) and _jsonable(v)}
    if meta:
        out["meta"] = meta
    return out


def _jsonable(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def surface_from_json(obj) -> Surface:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("schema", SCHEMA) != SCHEMA:
        raise InputError(f"unsupported schema {obj.get('schema')}")
    polys = [[Vec2.from_json(v) for v in poly] for poly in obj["polygons"]]
    s = Surface(polys, obj["gluings"], mode=obj.get("mode", "genus2"),
                marked=obj.get("marked", ()), meta=obj.get("meta"))
    if "disc" in obj and obj["disc"] and s.disc and s.disc != FieldElement(0, 1, 1, obj["disc"]).disc:
        raise InputError("declared disc does not match coordinates")
    return s
