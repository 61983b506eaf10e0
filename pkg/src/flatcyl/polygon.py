"""Involution-invariant triangulations and symmetric polygon models.

Every triangle is built on an oriented saddle connection ``e`` with its
interior on the left of ``e``.  The apex is the singularity reached first
by the vertical flow leaving ``e`` on that side, so the apex projects
vertically into ``e`` and the triangle has the same horizontal extent as
``e``.  The same rule gives the embedded parallelogram of an invariant
saddle connection, the 4 and 6 triangle decompositions, and the octagon
or decagon glued from a simple horizontal cylinder.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import PreconditionFailed
from .exactnum import ONE, ZERO, FieldElement, Vec2, dot, wedge
from .flow import (
    Cylinder,
    SaddleConnection,
    TraceExceeded,
    TraceHit,
    _frame_to_plane,
    compute_involution,
    cylinder_decomposition,
    fmod,
    trace_separatrix,
    translation_isomorphic,
)
from .surface import DEFAULT_BUDGET, SCHEMA, Surface
from .topology import intersection_number

__all__ = [
    "Triangle",
    "EmbeddedParallelogram",
    "InvariantTriangulation",
    "PolygonModel",
    "embedded_parallelogram",
    "invariant_triangulation",
    "canonical_polygon_form",
    "polygon_model_from_vertices",
    "classify_decagon",
]


class Triangle(NamedTuple):
    """Sides are counterclockwise with the interior on their left;
    ``sides[0]`` is the base.  ``apex`` is relative to the base start."""

    sides: tuple
    apex: Vec2
    height: FieldElement

    @property
    def base(self) -> SaddleConnection:
        return self.sides[0]

    @property
    def vertices(self):
        return (Vec2(ZERO, ZERO), self.base.holonomy, self.apex)

    @property
    def area(self) -> FieldElement:
        return wedge(self.base.holonomy, self.apex) / 2

    @property
    def hor(self) -> FieldElement:
        return max(abs(s.holonomy.x) for s in self.sides)

    def to_json(self) -> dict:
        return {"vertices": [v.to_json() for v in self.vertices],
                "sides": [s.holonomy.to_json() for s in self.sides]}


def _same_germ(S, g, h) -> bool:
    return S.same_germ(g, h)


def _opposite(S, f: SaddleConnection, g: SaddleConnection) -> bool:
    """g is f traversed backwards."""
    return g.holonomy == -f.holonomy and _same_germ(S, f.end, g.start)


def _same(S, f: SaddleConnection, g: SaddleConnection) -> bool:
    return f.holonomy == g.holonomy and _same_germ(S, f.start, g.start)


def _crossing(piece, params):
    """First crossing of a vertical ray piece with a saddle connection
    inside one triangle: (distance from p_in, fraction along it) or None."""
    t, p_in, p_out = piece
    x = p_in.x
    up = (p_out.y - p_in.y).sign()
    best = None
    for te, a, b, sa, sb in params:
        if te != t or a.x == b.x:
            continue
        if (a.x - x).sign() * (b.x - x).sign() > 0:
            continue
        lam = (x - a.x) / (b.x - a.x)
        y = a.y + lam * (b.y - a.y)
        dist = (y - p_in.y) * up
        if dist.sign() < 0 or dist > (p_out.y - p_in.y) * up:
            continue
        if best is None or dist < best[0]:
            best = (dist, sa + lam * (sb - sa))
    return best


def _apex(S: Surface, e: SaddleConnection, forbidden=(), budget=DEFAULT_BUDGET, strict=False):
    """Singularity first met by the vertical flow leaving e on its left.
    With ``strict=False`` the apex may sit straight above an endpoint."""
    h = e.holonomy
    if not h.x:
        raise PreconditionFailed("saddle connection is vertical")
    up = Vec2(0, 1) if h.x.sign() > 0 else Vec2(0, -1)
    down = -up
    limit = 2 * S.area / abs(h.x)
    target = e.params()
    blocked = [f.params() for f in forbidden if not (_same(S, f, e) or _opposite(S, f, e))]
    best = None
    for c in S.singular:
        for g in S.germs_in_direction(c, down):
            state = {"dist": ZERO}

            def visit(t, p_in, p_out, off, state=state):
                hit = _crossing((t, p_in, p_out), target)
                for prm in blocked:
                    b = _crossing((t, p_in, p_out), prm)
                    if b is None or b[1].sign() <= 0 or b[1] >= 1:
                        continue
                    if hit is None or b[0] < hit[0]:
                        return ("blocked",)
                if hit is not None and (hit[0] or state["dist"]):
                    return ("hit", state["dist"] + hit[0], hit[1])
                state["dist"] = state["dist"] + abs(p_out.y - p_in.y)
                return None

            r = S.trace(g, down, budget=budget, s_max=limit, visit=visit)
            if isinstance(r, TraceExceeded):
                raise PreconditionFailed("vertical flow exceeded the budget")
            if isinstance(r, TraceHit):
                frac = _endpoint_arrival(S, e, r.arrival, up)
                if frac is None:
                    continue
                dist = abs(r.holonomy.y)
            elif not isinstance(r, tuple) or not r or r[0] != "hit":
                continue
            else:
                _, dist, frac = r
            if best is None or (dist, frac) < best[:2]:
                best = (dist, frac, g)
    if best is None:
        raise PreconditionFailed("no vertical leaf from a singularity reaches the saddle connection")
    dist, frac, g = best
    if strict and (frac.sign() <= 0 or frac >= 1):
        raise PreconditionFailed("a vertical saddle connection ends at an endpoint")
    return h * frac + up * dist, dist, g


def _endpoint_arrival(S, e, arrival, up):
    """0 or 1 if a ray arriving with germ ``arrival`` (pointing back, i.e.
    along ``up``) ends at the start or end of e from its left side."""
    if S.same_germ(S.germ_sector_walk(e.start, up), arrival):
        return ZERO
    if S.same_germ(S.germ_sector_walk(arrival, -e.holonomy), e.end):
        return ONE
    return None


def _side(S, germ, target: Vec2, budget) -> SaddleConnection:
    sc = trace_separatrix(S, S.germ_sector_walk(germ, target), budget)
    if isinstance(sc, TraceExceeded) or sc.holonomy != target:
        raise PreconditionFailed("triangle side is not a saddle connection")
    return sc


def left_triangle(S: Surface, e: SaddleConnection, forbidden=(), budget=DEFAULT_BUDGET,
                  strict=False) -> Triangle:
    """Triangle on the left of e whose apex is the first vertical hit."""
    apex, height, g = _apex(S, e, forbidden, budget, strict)
    aq = _side(S, e.start, apex, budget)
    qb = _side(S, g, e.holonomy - apex, budget)
    return Triangle((e, qb.reversed(), aq.reversed()), apex, height)


# ---------------------------------------------------------- parallelogram


class EmbeddedParallelogram(NamedTuple):
    saddle: SaddleConnection
    vertices: tuple  # P1, P3, P2, P4 relative to the start of the saddle
    eta: FieldElement
    upper: Triangle
    lower: Triangle

    @property
    def sides(self):
        return (self.upper.sides[2].reversed(), self.upper.sides[1].reversed(),
                self.lower.sides[2].reversed(), self.lower.sides[1].reversed())

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "vertices": [v.to_json() for v in self.vertices],
                "eta": self.eta.to_json()}


def _oriented(s: SaddleConnection) -> SaddleConnection:
    return s if s.holonomy.x.sign() > 0 else s.reversed()


def embedded_parallelogram(S: Surface, s: SaddleConnection, budget=DEFAULT_BUDGET) -> EmbeddedParallelogram:
    """Parallelogram with diagonal s whose two halves are the triangles
    met by the vertical flow above and below s."""
    if not s.holonomy.x:
        raise PreconditionFailed("saddle connection is vertical")
    inv = compute_involution(S, budget)
    if not inv.is_invariant(s):
        raise PreconditionFailed("saddle connection is not invariant under the involution")
    s = _oriented(s)
    upper = left_triangle(S, s, budget=budget, strict=False)
    lower = left_triangle(S, s.reversed(), budget=budget, strict=False)
    h = s.holonomy
    p3 = upper.apex
    p4 = h + lower.apex
    if p4 != h - p3 or upper.height != lower.height:
        raise AssertionError("the two halves are not exchanged by the involution")
    verts = (Vec2(ZERO, ZERO), p3, h, p4)
    return EmbeddedParallelogram(s, verts, upper.height, upper, lower)


# ----------------------------------------------------------- triangulation


class InvariantTriangulation(NamedTuple):
    plus: tuple        # Delta_1^+, Delta_2^+, ...
    minus: tuple       # images under the involution, same order
    attached: tuple    # for i >= 2: (j, side index) where Delta_i^+ meets Delta_j^+
    configuration: str

    @property
    def triangles(self):
        return self.plus + self.minus

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "configuration": self.configuration,
            "plus": [t.to_json() for t in self.plus],
            "minus": [t.to_json() for t in self.minus],
        }


def _partner(S, f, tris, extra):
    n = 0
    for T in tris:
        for g in T.sides:
            if _opposite(S, f, g):
                n += 1
    for a, b in extra:
        if _same(S, f, a) or _same(S, f, b):
            n += 1
    return n


def _complete(S, inv, plus, minus, attached, target, extra, forbidden, budget, k_max):
    tris = plus + minus
    area = sum((T.area for T in tris), ZERO)
    if area == target:
        if all(_partner(S, f, tris, extra) == 1 for T in tris for f in T.sides):
            return plus, minus, attached
        return None
    if area > target or len(plus) >= k_max:
        return None
    for j, T in enumerate(plus):
        for i, f in enumerate(T.sides):
            if _partner(S, f, tris, extra):
                continue
            try:
                Tp = left_triangle(S, f.reversed(), forbidden, budget)
                Tm = left_triangle(S, inv.map_saddle(Tp.base), forbidden, budget)
            except PreconditionFailed:
                continue
            r = _complete(S, inv, plus + [Tp], minus + [Tm], attached + [(j, i)],
                          target, extra, forbidden, budget, k_max)
            if r is not None:
                return r
    return None


def _configuration(k, attached):
    where = {1: "end", 2: "start"}
    if k == 2:
        return where[attached[0][1]]
    if attached[1][0] == 0:
        return "a"
    return "b-" + where[attached[0][1]]


def invariant_triangulation(S: Surface, s: SaddleConnection, budget=DEFAULT_BUDGET) -> InvariantTriangulation:
    """Triangulation into pairs exchanged by the involution, starting from
    the embedded parallelogram of the horizontal invariant saddle
    connection s: 4 triangles on a slit torus, 6 on a surface in H(2).

    ``configuration`` is ``"start"``/``"end"`` on a torus (the end of s
    that the side carrying Delta_2^+ touches) and ``"a"``, ``"b-start"``
    or ``"b-end"`` in H(2): in case a both Delta_2^+ and Delta_3^+ touch
    Delta_1^+, in case b Delta_3^+ touches Delta_2^+.
    """
    if s.holonomy.y:
        raise PreconditionFailed("saddle connection is not horizontal")
    par = embedded_parallelogram(S, s, budget)
    k = 2 if S.genus == 1 else 3
    if S.genus == 2 and S.stratum != "H(2)":
        raise PreconditionFailed("surface must be a slit torus or lie in H(2)")
    inv = compute_involution(S, budget)
    r = _complete(S, inv, [par.upper], [par.lower], [], S.area, (), (), budget, k)
    if r is None:
        raise PreconditionFailed("no invariant triangulation; some vertical leaf misses s")
    plus, minus, attached = r
    return InvariantTriangulation(tuple(plus), tuple(minus), tuple(attached),
                                  _configuration(k, attached))


# --------------------------------------------------------- polygon models


def _segment_inside(poly, a: Vec2, b: Vec2) -> bool:
    """Interior of the segment [a, b] lies in the interior of the simple
    polygon ``poly`` (a and b are vertices or interior points)."""
    n = len(poly)
    d = b - a
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        e = q - p
        den = wedge(d, e)
        if not den:
            if not wedge(p - a, d):
                # collinear: overlapping boundary pieces are not interior
                t0 = dot(p - a, d) / dot(d, d)
                t1 = dot(q - a, d) / dot(d, d)
                lo, hi = min(t0, t1), max(t0, t1)
                if lo < 1 and hi > 0:
                    return False
            continue
        t = wedge(p - a, e) / den
        u = wedge(p - a, d) / den
        if ZERO < t < ONE and ZERO <= u <= ONE:
            return False
    for v in poly:
        w = v - a
        if not wedge(w, d) and ZERO < dot(w, d) < dot(d, d):
            return False
    return _point_inside(poly, (a + b) / 2)


def _point_inside(poly, p: Vec2) -> bool:
    n = len(poly)
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x:
                inside = not inside
    return inside


class PolygonModel(NamedTuple):
    """Centrally symmetric polygon P_0..P_n Q_0..Q_n (clockwise) whose
    opposite sides are glued; n = 3 (octagon) or 4 (decagon)."""

    P: tuple
    Q: tuple
    triangulation: InvariantTriangulation | None

    @property
    def kind(self) -> str:
        return "octagon" if len(self.P) == 4 else "decagon"

    @property
    def vertices(self):
        return self.P + self.Q

    def edge_vectors(self):
        v = self.vertices
        return [v[(i + 1) % len(v)] - v[i] for i in range(len(v))]

    @property
    def model(self) -> str | None:
        return classify_decagon(self) if self.kind == "decagon" else None

    def checks(self) -> dict:
        """Each defining condition of the model as a boolean."""
        P, Q, n = self.P, self.Q, len(self.P) - 1
        ccw = list(reversed(self.vertices))
        out = {}
        out["opposite_sides"] = all(P[i + 1] - P[i] == -(Q[i + 1] - Q[i]) for i in range(n)) and \
            Q[0] - P[n] == -(P[0] - Q[n])
        out["horizontal_diagonals"] = not (P[n] - P[0]).y and not (Q[n] - Q[0]).y
        para = [P[0], P[n], Q[0], Q[n]]
        out["parallelogram_inside"] = all(
            _segment_inside(ccw, para[i], para[(i + 1) % 4]) or _on_boundary(ccw, para[i], para[(i + 1) % 4])
            for i in range(4)) and (P[n] - P[0]).x.sign() > 0 and P[0].y > Q[n].y
        ok = True
        for side, (a, b) in ((P, (P[0], P[n])), (Q, (Q[0], Q[n]))):
            lo, hi = min(a.x, b.x), max(a.x, b.x)
            for v in side[1:n]:
                if not (lo <= v.x <= hi):
                    ok = False
                    continue
                foot = Vec2(v.x, a.y)
                if foot != v and not (_segment_inside(ccw, v, foot) or _on_boundary(ccw, v, foot)):
                    ok = False
        out["vertical_projections"] = ok
        return out

    def to_surface(self) -> Surface:
        verts = self.vertices
        m = len(verts)
        n = len(self.P) - 1
        ccw = list(reversed(verts))
        # clockwise edge k is counterclockwise edge m-2-k (mod m), reversed
        cc = lambda k: (m - 2 - k) % m  # noqa: E731
        gl = [(0, cc(i), 0, cc(n + 1 + i)) for i in range(n + 1)]
        return Surface([ccw], gl, mode="genus2", allow_nonconvex=True, meta={"kind": self.kind})

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "model": self.model,
            "P": [v.to_json() for v in self.P],
            "Q": [v.to_json() for v in self.Q],
        }


def _on_boundary(poly, a, b) -> bool:
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        if not wedge(q - p, a - p) and not wedge(q - p, b - p):
            if _between(p, q, a) and _between(p, q, b):
                return True
    return False


def _between(p, q, x) -> bool:
    return dot(x - p, q - p).sign() >= 0 and dot(x - q, p - q).sign() >= 0


def classify_decagon(m: PolygonModel) -> str:
    """Model I, II or III by how many of the chords P0P2, P2P4 run through
    the interior."""
    if m.kind != "decagon":
        raise PreconditionFailed("models are defined for decagons")
    ccw = list(reversed(m.vertices))
    inside = int(_segment_inside(ccw, m.P[0], m.P[2])) + int(_segment_inside(ccw, m.P[2], m.P[4]))
    return {2: "I", 1: "II", 0: "III"}[inside]


def polygon_model_from_vertices(P, Q) -> PolygonModel:
    P = tuple(_v(v) for v in P)
    Q = tuple(_v(v) for v in Q)
    if len(P) != len(Q) or len(P) not in (4, 5):
        raise PreconditionFailed("need 4 + 4 or 5 + 5 vertices")
    return PolygonModel(P, Q, None)


def _v(v):
    return v if isinstance(v, Vec2) else Vec2(*v)


def _check_vertical_leaves(S, C, budget):
    dec = cylinder_decomposition(S, Vec2(0, 1), budget)
    if not dec.periodic:
        return
    for V in dec.cylinders:
        if intersection_number(S, V, C) == 0:
            raise PreconditionFailed("a vertical cylinder misses the simple cylinder")


def canonical_polygon_form(S: Surface, C: Cylinder, budget=DEFAULT_BUDGET) -> PolygonModel:
    """Octagon (H(2)) or decagon (H(1,1)) model of S in which the simple
    horizontal cylinder C is the central parallelogram.

    The triangles above and below C are those of the invariant
    triangulation of the surface obtained by removing C and gluing its
    boundary.  The parallelogram of C is normalised so that its left side
    starts at the bottom-left corner with horizontal offset in [0, |C|).
    """
    if C.degenerate or not C.simple:
        raise PreconditionFailed("cylinder must be simple and non-degenerate")
    dec = C.decomposition
    if dec.d.y or dec.surface is not S:
        raise PreconditionFailed("cylinder must be a horizontal cylinder of S")
    if S.stratum not in ("H(2)", "H(1,1)"):
        raise PreconditionFailed("surface must lie in H(2) or H(1,1)")
    _check_vertical_leaves(S, C, budget)
    top = dec.saddles[C.top[0]]
    bot = dec.saddles[C.bottom[0]]
    top, bot = _oriented(top), _oriented(bot)
    inv = compute_involution(S, budget)
    forbidden = (top, bot)
    try:
        up = left_triangle(S, top, forbidden, budget)
        dn = left_triangle(S, bot.reversed(), forbidden, budget)
    except PreconditionFailed as exc:
        raise PreconditionFailed(f"some vertical leaf misses the cylinder ({exc})") from None
    k = 2 if S.stratum == "H(2)" else 3
    extra = ((top, bot.reversed()),)
    r = _complete(S, inv, [up], [dn], [], S.area - C.area, extra, forbidden, budget, k)
    if r is None:
        raise PreconditionFailed("complement of the cylinder has no invariant triangulation")
    plus, minus, attached = r
    tri = InvariantTriangulation(tuple(plus), tuple(minus), tuple(attached), _configuration(k, attached))
    mu = C.mu
    w = _frame_to_plane(dec, fmod(-C.delta, mu), C.eta)
    v = top.holonomy
    q_last = Vec2(ZERO, ZERO)
    p0 = q_last + w
    upper = _chain(S, plus, attached, p0, p0 + v)
    lower = _chain(S, minus, attached, v, q_last)
    # upper: P_n -> ... -> P_0 counterclockwise; lower: Q_n -> ... -> Q_0
    P = tuple(reversed(upper))
    Q = tuple(reversed(lower))
    model = PolygonModel(P, Q, tri)
    return model


def _chain(S, tris, attached, start, end):
    """Outer boundary (counterclockwise, from ``end`` back to ``start``) of
    the triangles glued successively onto the base from start to end."""
    placed = [None] * len(tris)
    placed[0] = start
    for i in range(1, len(tris)):
        j, side = attached[i - 1]
        origin = placed[j]
        T = tris[j]
        corners = (origin, origin + T.base.holonomy, origin + T.apex)
        # side index i of T runs from corners[i] to corners[i + 1]
        placed[i] = corners[(side + 1) % 3]
    edges = []
    for i, T in enumerate(tris):
        o = placed[i]
        corners = (o, o + T.base.holonomy, o + T.apex)
        for si, f in enumerate(T.sides):
            internal = any(_opposite(S, f, g) for U in tris for g in U.sides if U is not T) or \
                (i == 0 and si == 0)
            if not internal:
                edges.append((corners[si], corners[(si + 1) % 3]))
    nxt = {a: b for a, b in edges}
    if len(nxt) != len(edges):
        raise AssertionError("boundary of the glued triangles is not a simple chain")
    out = [end]
    cur = end
    while cur != start:
        cur = nxt[cur]
        out.append(cur)
        if len(out) > len(edges) + 1:
            raise AssertionError("boundary chain does not close")
    return out


def rebuild_matches(S: Surface, model: PolygonModel, budget=DEFAULT_BUDGET) -> bool:
    """Gluing the polygon back gives a surface translation equivalent to S."""
    return translation_isomorphic(S, model.to_surface(), budget)
