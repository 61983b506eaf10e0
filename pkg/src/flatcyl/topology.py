"""Geometric intersection numbers of cylinder core curves.

The exact algorithm walks one core curve through the cylinder frames of the
other curve's direction.  A straight segment that is not parallel to a
cylinder crosses it from one boundary to the other, so the number of
crossings with a non-degenerate core is the number of passes through its
mid-height line.  Degenerate cores (two saddle connections) meet at zeros,
where a crossing is counted when the germs interleave.

``brute_force_intersection`` is an independent check that intersects the
two mid-height geodesics segment by segment in the base triangulation, and
``deformation_intersection`` opens a degenerate cylinder and counts on the
deformed surface.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DifferentSurfaces, PreconditionFailed
from .exactnum import ZERO, Vec2, dot, wedge
from .flow import (
    _canon_vec,
    Cylinder,
    Decomposition,
    cylinder_decomposition,
    deformation_oracle,
    fmod,
)
from .surface import Germ, Surface, TraceStop

__all__ = [
    "intersection_number",
    "disjoint",
    "brute_force_intersection",
    "deformation_intersection",
    "core_start",
    "FrameWalker",
]


class FrameWalker:
    """Straight-line walks through the cylinders of a periodic direction.

    A position is ``(cylinder index, x, y)`` in that cylinder's frame.
    """

    def __init__(self, dec: Decomposition):
        self.dec = dec
        self.S = dec.surface
        self._key = self.S.germ_key()

    def start_at(self, g: Germ):
        """Frame position of a zero, seen from the side germ g points to."""
        dec = self.dec
        lst = dec.germ_lists[g.vclass]
        kg = self._key(g)
        pick = len(lst) - 1
        for i, (h, _) in enumerate(lst):
            if self._key(h) < kg:
                pick = i
        h, kind = lst[pick]
        if kind == "E":
            s = dec.start_of[(h.vclass, h.corner)]
            c, pos = dec.above[s]
            return c, pos, ZERO
        s = _arriving(dec, h)
        c, tpos = dec.below[s]
        cyl = dec.cylinders[c]
        return c, fmod(tpos + dec.mus[s] - cyl.delta, cyl.mu), cyl.eta

    def walk(self, pos, v: Vec2, total, mid=None, saddles=None, stop_at=None):
        """Move from ``pos`` along ``v`` for parameter ``total``.

        ``mid[c]`` counts mid-height crossings of cylinder c on the
        half-open parameter range (0, total]; ``saddles`` collects
        ``(saddle, offset)`` for every boundary crossing.  Returns the end
        position (on a boundary if the walk ends there).  With ``stop_at``
        the walk raises :class:`_AllCrossed` once ``mid`` has that many keys.
        """
        dec = self.dec
        d = dec.d
        alpha = dot(d, v) / dec.dd
        beta = wedge(d, v)
        if not beta:
            raise ValueError("walk direction is parallel to the decomposition")
        c, x, y = pos
        s = ZERO
        while True:
            cyl = dec.cylinders[c]
            target = cyl.eta if beta.sign() > 0 else ZERO
            s_exit = s + (target - y) / beta
            if mid is not None:
                s_mid = s + (cyl.eta / 2 - y) / beta
                if s < s_mid and s_mid <= total and s_mid <= s_exit:
                    mid[c] = mid.get(c, 0) + 1
                    if stop_at is not None and len(mid) >= stop_at:
                        raise _AllCrossed
            if s_exit > total:
                return c, x + alpha * (total - s), y + beta * (total - s)
            x_exit = x + alpha * (s_exit - s)
            if s_exit == total:
                return c, fmod(x_exit, cyl.mu), target
            if beta.sign() > 0:
                sd, off = dec.top_at(cyl, x_exit)
                if not off:
                    raise ValueError("walk ran into a zero")
                c, p = dec.above[sd]
                x, y = fmod(p + off, dec.cylinders[c].mu), ZERO
            else:
                sd, off = dec.bottom_at(cyl, x_exit)
                if not off:
                    raise ValueError("walk ran into a zero")
                c, p = dec.below[sd]
                nc = dec.cylinders[c]
                x, y = fmod(p + off - nc.delta, nc.mu), nc.eta
            if saddles is not None:
                saddles.append((sd, off))
            s = s_exit


class _AllCrossed(Exception):
    pass


def _arriving(dec, w: Germ) -> int:
    for i, s in enumerate(dec.saddles):
        if s.end.vclass == w.vclass and s.end.corner == w.corner:
            return i
    raise AssertionError("no saddle arrives at this germ")


def core_start(C: Cylinder, avoid: Vec2 | None = None):
    """A way into the mid-height core of a non-degenerate cylinder.

    Returns ``(germ, w, s)``: leaving the zero at the start of the first
    bottom saddle along germ ``w`` for parameter ``s`` lands on the core.
    ``w`` is chosen non-parallel to ``avoid``.
    """
    dec = C.decomposition
    S = dec.surface
    d = dec.d
    w = d.perp()
    if avoid is not None and not wedge(avoid, w):
        w = w + d
    sad = dec.saddles[C.bottom[0]]
    g = S.germ_sector_walk(sad.start, w)
    s = C.eta / (2 * dec.dd)
    return g, w, s


def _path_pieces(C: Cylinder):
    dec = C.decomposition
    return [(dec.saddles[i].start, dec.saddles[i].holonomy) for i in C.join]


def _mid_counts(C: Cylinder, D: Cylinder, stop_at=None) -> dict:
    """Crossings of D's core with the mid-height lines of every cylinder
    parallel to the non-degenerate C, keyed by cylinder index."""
    walker = FrameWalker(C.decomposition)
    mid = {}
    try:
        _walk_core(walker, C, D, mid, stop_at)
    except _AllCrossed:
        pass
    return mid


def _walk_core(walker, C, D, mid, stop_at):
    if D.kind == "nondegenerate":
        g, w, s = core_start(D, avoid=C.d)
        pos = walker.walk(walker.start_at(g), w, s)
        walker.walk(pos, D.d, D.mu, mid=mid, stop_at=stop_at)
    else:
        for g, hol in _path_pieces(D):
            walker.walk(walker.start_at(g), hol, Fraction(1), mid=mid, stop_at=stop_at)


def _between(key, a, b, x) -> bool:
    """x strictly inside the counterclockwise arc from a to b."""
    ka, kb, kx = key(a), key(b), key(x)
    if ka < kb:
        return ka < kx and kx < kb
    return kx > ka or kx < kb


def _visits(C: Cylinder):
    """(zero, incoming germ, outgoing germ) for each corner of a degenerate
    core."""
    dec = C.decomposition
    s1, s2 = (dec.saddles[i] for i in C.join)
    return [(s1.end.vclass, s1.end, s2.start), (s2.end.vclass, s2.end, s1.start)]


def _deg_deg_count(C: Cylinder, D: Cylinder) -> int:
    S = C.surface
    walker = FrameWalker(C.decomposition)
    hits = []
    for g, hol in _path_pieces(D):
        walker.walk(walker.start_at(g), hol, Fraction(1), saddles=hits)
    n = sum(1 for sd, _ in hits if sd in C.join)
    key = S.germ_key()
    for z, a, b in _visits(C):
        for z2, c, e in _visits(D):
            if z != z2:
                continue
            if _between(key, a, b, c) != _between(key, a, b, e):
                n += 1
    return n


def intersection_number(S: Surface, C: Cylinder, D: Cylinder) -> int:
    """Geometric intersection number of the core curves of C and D."""
    if C.surface is not S or D.surface is not S:
        raise DifferentSurfaces("cylinders do not live on this surface")
    if C.key == D.key:
        return 0
    if C.direction == D.direction:
        if C.degenerate and D.degenerate:
            shared = {C.decomposition.saddles[i].key for i in C.join} & {
                D.decomposition.saddles[i].key for i in D.join}
            return 1 if len(shared) == 1 else 0
        return 0
    cache = S.cached("iota", dict)
    k = (C.key, D.key)
    if k in cache:
        return cache[k]
    if C.degenerate and not D.degenerate:
        C, D = D, C
    if not C.degenerate:
        mid = _mid_counts(C, D)
        for E in C.decomposition.cylinders:
            cache[(E.key, D.key)] = cache[(D.key, E.key)] = mid.get(E.index, 0)
        n = mid.get(C.index, 0)
    else:
        n = _deg_deg_count(C, D)
    cache[k] = cache[(D.key, C.key)] = n
    return n


def disjoint(S: Surface, C: Cylinder, D: Cylinder) -> bool:
    """True iff the cores can be made disjoint (intersection number 0).

    Cheaper than :func:`intersection_number` for non-parallel pairs: the
    walk stops as soon as every cylinder of the direction has been met.
    """
    if C.surface is not S or D.surface is not S:
        raise DifferentSurfaces("cylinders do not live on this surface")
    if C.direction == D.direction or (C.degenerate and D.degenerate):
        return intersection_number(S, C, D) == 0
    exact = S.cached("iota", dict)
    if (C.key, D.key) in exact:
        return exact[(C.key, D.key)] == 0
    if C.degenerate:
        C, D = D, C
    if not D.degenerate and C.area + D.area > S.area:
        return False
    touch = S.cached("touch", dict)
    k = (C.decomposition.direction.key, D.key)
    if k not in touch:
        dec = C.decomposition
        touch[k] = set(_mid_counts(C, D, stop_at=len(dec.cylinders)))
    return C.index not in touch[k]


# ------------------------------------------------------------------ oracles


def _core_segments(C: Cylinder):
    S = C.surface
    g, w, s = core_start(C)
    st = S.trace(g, w, s_max=s)
    if not isinstance(st, TraceStop):
        raise AssertionError("core start not reached")
    r = S.trace((st.tri, st.point), C.d, s_max=C.mu, record=True)
    if not isinstance(r, TraceStop):
        raise AssertionError("core curve did not close")
    return r.segments


def _point_key(S: Surface, t: int, p: Vec2):
    pts = S.tri_pts[t]
    for j in range(3):
        if p == pts[j]:
            return ("v", S.corner_class[t][j])
    for j in range(3):
        e = S.tri_edges[t][j]
        q = p - pts[j]
        if not wedge(e, q):
            lam = dot(q, e) / dot(e, e)
            t2, j2 = S.tri_glue[t][j]
            return min(("e", t, j, lam), ("e", t2, j2, 1 - lam))
    return ("i", t, p.x, p.y)


def brute_force_intersection(S: Surface, C: Cylinder, D: Cylinder) -> int:
    """Count intersection points of the two mid-height core geodesics by
    exact segment intersection in the triangulation (non-degenerate,
    non-parallel cylinders)."""
    if C.degenerate or D.degenerate:
        raise PreconditionFailed("brute force needs non-degenerate cylinders")
    if C.direction == D.direction:
        return 0
    A = {}
    for t, a, b in _core_segments(C):
        A.setdefault(t, []).append((a, b))
    points = set()
    for t, c, e in _core_segments(D):
        for a, b in A.get(t, ()):
            r, q = b - a, e - c
            den = wedge(r, q)
            if not den:
                continue
            lam = wedge(c - a, q) / den
            mu = wedge(c - a, r) / den
            if 0 <= lam <= 1 and 0 <= mu <= 1:
                points.add(_point_key(S, t, a + r * lam))
    return len(points)


def _normalizing_matrix(d1: Vec2, d2: Vec2):
    det = wedge(d1, d2)
    return ((d2.y / det, -d2.x / det), (-d1.y / det, d1.x / det))


def deformation_intersection(S: Surface, C: Cylinder, D: Cylinder, t=None) -> int:
    """Intersection number of a degenerate C with a non-degenerate D,
    counted on the surface where C is opened into a simple cylinder.

    The surface is first mapped linearly so that C is horizontal and D is
    vertical; a closed vertical leaf of D then persists on the deformed
    surface and its passes through the inserted cylinder are counted.
    """
    if not C.degenerate or D.degenerate or C.direction == D.direction:
        raise PreconditionFailed("need a degenerate C and a non-parallel non-degenerate D")
    d1, d2 = C.d, D.d
    if wedge(d1, d2).sign() < 0:
        d2 = -d2
    M = _normalizing_matrix(d1, d2)
    S2 = S.transformed(M)
    dec1 = cylinder_decomposition(S2, Vec2(1, 0))
    dec2 = cylinder_decomposition(S2, Vec2(0, 1))
    C2 = _match(dec1.degenerates, C, M)
    D2 = _match(dec2.cylinders, D, M)
    if t is None:
        t = min(c.eta for c in dec1.cylinders) / 2
    DS = deformation_oracle(S2, C2, t)
    walker = FrameWalker(dec1)
    g, w, s = core_start(D2, avoid=Vec2(1, 0))
    c, x, y = walker.walk(walker.start_at(g), w, s)
    tri0, p0 = DS.frame_point(c, x, y)
    St = DS.surface
    up = Vec2(0, 1)
    state = {"inside": False, "count": 0, "first": True}

    def visit(tt, a, b, off):
        inside = St.tri_src[tt][0] == DS.opened_polygon
        if inside and not state["inside"]:
            state["count"] += 1
        state["inside"] = inside
        if tt == tri0 and not state["first"] and _on_segment(p0, a, b):
            return ("closed",)
        state["first"] = False
        return None

    res = St.trace((tri0, p0), up, budget=100_000, visit=visit)
    if res != ("closed",):
        raise AssertionError("vertical leaf did not close on the deformed surface")
    return state["count"]


def _on_segment(p, a, b) -> bool:
    if wedge(b - a, p - a):
        return False
    s = dot(p - a, b - a)
    return 0 <= s <= dot(b - a, b - a)


def _match(cands, X: Cylinder, M):
    dec = X.decomposition
    ids = X.join if X.degenerate else X.bottom + X.top
    want = set()
    for i in ids:
        s = dec.saddles[i]
        h = s.holonomy.apply(M)
        if _canon_vec(h):
            want.add((s.start.vclass, s.start.corner, h))
        else:
            want.add((s.end.vclass, s.end.corner, -h))
    for Y in cands:
        d2 = Y.decomposition
        jd = Y.join if Y.degenerate else Y.bottom + Y.top
        got = set()
        for i in jd:
            s = d2.saddles[i]
            got.add((s.start.vclass, s.start.corner, s.holonomy))
        if got == want:
            return Y
    raise AssertionError("cylinder not found after the linear map")
