"""Straight-line flow: separatrices, cylinder decompositions, saddle
connections, the hyperelliptic involution and the slit-torus lemmas.

Directions are handled in *direction units*: for a direction with primitive
vector ``d`` a saddle connection of holonomy ``mu * d`` has length ``mu``
in these units, and the height of a cylinder is measured by
``eta = wedge(d, displacement)``.  Then ``area = mu_C * eta_C`` exactly and
``circumference**2 = mu_C**2 * |d|**2``; no square roots are ever taken.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd
from typing import NamedTuple

from .errors import NoRoom, NotFound, PreconditionFailed, TooLargeT
from .exactnum import ONE, ZERO, Direction, FieldElement, Vec2, as_fe, dot, wedge
from .surface import (
    DEFAULT_BUDGET,
    Germ,
    Surface,
    TraceExceeded,
    TraceHit,
    TraceStop,
    build_slit_torus,
)

__all__ = [
    "SaddleConnection",
    "Cylinder",
    "Decomposition",
    "Involution",
    "trace_separatrix",
    "cylinder_decomposition",
    "compute_involution",
    "enumerate_saddle_connections",
    "saddle_directions",
    "slit_disjoint_cylinder",
    "bounded_circumference_cylinder",
    "deformation_oracle",
    "fmod",
    "translation_isomorphic",
    "decompositions_isomorphic",
]


def fmod(x: FieldElement, m: FieldElement) -> FieldElement:
    """x reduced into [0, m)."""
    if x.sign() >= 0:
        r = x - m
        if r.sign() < 0:
            return x
        if (r - m).sign() < 0:
            return r
    else:
        r = x + m
        if r.sign() >= 0:
            return r
    q = (x / m).floor()
    return x - m * q if q else x


def _canon_vec(v: Vec2) -> bool:
    """True if v is in the canonical half plane (y > 0, or y = 0 and x > 0)."""
    sy = v.y.sign()
    return sy > 0 or (sy == 0 and v.x.sign() > 0)


class SaddleConnection:
    """A saddle connection with its start and arrival germs.

    ``end`` is the germ at the end point pointing back along the segment.
    ``segments`` lists ``(tri, p_in, p_out)`` pieces in local coordinates.
    """

    __slots__ = ("start", "end", "holonomy", "_segments", "key", "_params", "_surface")

    def __init__(self, start: Germ, end: Germ, holonomy: Vec2, segments=None, surface=None):
        self.start = start
        self.end = end
        self.holonomy = holonomy
        self._segments = None if segments is None else tuple(segments)
        self._surface = surface
        self.key = (start.vclass, start.corner, holonomy.x, holonomy.y)
        self._params = None

    @property
    def segments(self):
        if self._segments is None:
            r = self._surface.trace(self.start, self.holonomy, record=True)
            self._segments = tuple(r.segments)
        return self._segments

    @property
    def start_zero(self) -> int:
        return self.start.vclass

    @property
    def end_zero(self) -> int:
        return self.end.vclass

    @property
    def developed_path(self):
        return self.segments

    def length2(self) -> FieldElement:
        return self.holonomy.norm2()

    def reversed(self) -> "SaddleConnection":
        if self._segments is None:
            return SaddleConnection(self.end, self.start, -self.holonomy, surface=self._surface)
        segs = [(t, b, a) for t, a, b in reversed(self._segments)]
        return SaddleConnection(self.end, self.start, -self.holonomy, segs, self._surface)

    def canonical(self) -> "SaddleConnection":
        return self if _canon_vec(self.holonomy) else self.reversed()

    def canonical_key(self):
        return self.canonical().key

    def params(self):
        """Per segment: (tri, a, b, s_a, s_b) with s the fraction along the
        saddle connection (0 at the start, 1 at the end)."""
        if self._params is None:
            h = self.holonomy
            hh = dot(h, h)
            out, s = [], ZERO
            for t, a, b in self.segments:
                s2 = s + dot(b - a, h) / hh
                out.append((t, a, b, s, s2))
                s = s2
            self._params = tuple(out)
        return self._params

    def __repr__(self):
        return f"SaddleConnection({self.start.vclass}->{self.end.vclass}, hol=({self.holonomy.x}, {self.holonomy.y}))"

    def to_json(self) -> dict:
        return {
            "start_zero": self.start.vclass,
            "end_zero": self.end.vclass,
            "holonomy": self.holonomy.to_json(),
            "start_sector": self.start.corner,
        }


def trace_separatrix(S: Surface, germ: Germ, budget: int = DEFAULT_BUDGET):
    """Trace the ray leaving ``germ``; returns a SaddleConnection (a hit)
    or a TraceExceeded value."""
    r = S.trace(germ, germ.vec, budget=budget, record=True)
    if isinstance(r, TraceExceeded):
        return r
    return SaddleConnection(germ, r.arrival, r.holonomy, r.segments, S)


class Cylinder:
    """A cylinder in a periodic direction, or a degenerate cylinder.

    Non-degenerate cylinders use a frame in which x runs along the
    direction (in direction units, modulo ``mu``) starting at the start
    point of ``bottom[0]``, and y in ``[0, eta]``.  The top boundary point
    above frame coordinate x has top-chain coordinate ``x + delta``.
    """

    def __init__(self, dec, index, kind, **kw):
        self.decomposition = dec
        self.index = index
        self.kind = kind
        self.direction = dec.direction
        self.d = dec.d
        self.__dict__.update(kw)
        if kind == "nondegenerate":
            sk = sorted(set(dec.saddles[i].key for i in self.bottom + self.top), key=_key_sort)
            self.key = (dec.direction.key, "C", tuple(sk))
        else:
            sk = sorted((dec.saddles[self.s1].key, dec.saddles[self.s2].key), key=_key_sort)
            self.key = (dec.direction.key, "G", tuple(sk))

    @property
    def surface(self):
        return self.decomposition.surface

    @property
    def degenerate(self) -> bool:
        return self.kind == "degenerate"

    @property
    def simple(self) -> bool:
        return self.kind == "nondegenerate" and len(self.bottom) == 1 and len(self.top) == 1

    @property
    def area(self) -> FieldElement:
        return self.mu * self.eta if self.kind == "nondegenerate" else ZERO

    @property
    def circumference2(self) -> FieldElement:
        return self.mu * self.mu * self.dec_dd

    @property
    def dec_dd(self):
        return self.decomposition.dd

    @property
    def height2(self) -> FieldElement:
        if self.kind != "nondegenerate":
            return ZERO
        return self.eta * self.eta / self.dec_dd

    @property
    def holonomy(self) -> Vec2:
        """Holonomy of the core curve (for a degenerate cylinder: s1 + s2)."""
        return self.d * self.mu

    @property
    def boundary_saddles(self):
        if self.kind == "nondegenerate":
            return (self.bottom, self.top)
        return ((self.s1, self.s2),)

    def __repr__(self):
        if self.kind == "nondegenerate":
            return (f"Cylinder(dir={self.d.x},{self.d.y}; mu={self.mu}, eta={self.eta}, "
                    f"simple={self.simple})")
        return f"DegenerateCylinder(dir={self.d.x},{self.d.y}; mu={self.mu})"

    def __eq__(self, other):
        return isinstance(other, Cylinder) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def to_json(self) -> dict:
        dec = self.decomposition
        if self.kind == "nondegenerate":
            return {
                "kind": "nondegenerate",
                "circumference2": self.circumference2.to_json(),
                "height2": self.height2.to_json(),
                "area": self.area.to_json(),
                "simple": self.simple,
                "boundary": [
                    [dec.saddles[i].to_json() for i in self.bottom],
                    [dec.saddles[i].to_json() for i in self.top],
                ],
            }
        return {
            "kind": "degenerate",
            "circumference2": self.circumference2.to_json(),
            "saddles": [dec.saddles[self.s1].to_json(), dec.saddles[self.s2].to_json()],
        }


def _key_sort(k):
    return (k[0], k[1], float(k[2]), float(k[3]), str(k[2]), str(k[3]))


class Decomposition:
    """Result of :func:`cylinder_decomposition`.

    ``status`` is ``"periodic"`` or ``"budget"`` (not closed within the
    budget).  For periodic directions ``cylinders`` and ``degenerates`` are
    filled and every saddle connection of the direction bounds a cylinder.
    """

    def __init__(self, surface, direction, status, budget):
        self.surface = surface
        self.direction = direction
        self.d = direction.vector
        self.dd = dot(self.d, self.d)
        self.status = status
        self.budget = budget
        self.saddles = []
        self.cylinders = []
        self.degenerates = []

    @property
    def periodic(self) -> bool:
        return self.status == "periodic"

    @property
    def all_cylinders(self):
        return self.cylinders + self.degenerates

    def __repr__(self):
        return (f"Decomposition(dir={self.d.x},{self.d.y}, {self.status}, "
                f"{len(self.cylinders)} cylinders, {len(self.degenerates)} degenerate)")

    def to_json(self) -> dict:
        out = {
            "direction": self.d.to_json(),
            "status": self.status,
        }
        if self.periodic:
            out["cylinders"] = [c.to_json() for c in self.cylinders]
            out["degenerates"] = [c.to_json() for c in self.degenerates]
            out["saddles"] = [s.to_json() for s in self.saddles]
        else:
            out["budget"] = self.budget
        return out

    # helpers for frames -------------------------------------------------------

    def frame_from_bottom(self, s: int, offset) -> tuple:
        """(cylinder, x) of the point at ``offset`` along bottom saddle s."""
        c, pos = self.above[s]
        cyl = self.cylinders[c]
        return cyl, fmod(pos + offset, cyl.mu)

    def frame_from_top(self, s: int, offset) -> tuple:
        """(cylinder, x) of the point at ``offset`` along top saddle s."""
        c, pos = self.below[s]
        cyl = self.cylinders[c]
        return cyl, fmod(pos + offset - cyl.delta, cyl.mu)

    def bottom_at(self, cyl, x):
        """(saddle, offset) on the bottom chain at frame coordinate x."""
        x = fmod(x, cyl.mu)
        for k, s in enumerate(cyl.bottom):
            b0, b1 = cyl.B[k], cyl.B[k + 1]
            if x < b1:
                return s, x - b0
        raise AssertionError("frame coordinate outside the chain")

    def top_at(self, cyl, x):
        """(saddle, offset) on the top chain at frame coordinate x."""
        tc = fmod(x + cyl.delta, cyl.mu)
        for k, s in enumerate(cyl.top):
            if tc < cyl.T[k + 1]:
                return s, tc - cyl.T[k]
        raise AssertionError("frame coordinate outside the chain")


def _raw_decomposition(S: Surface, direction: Direction, budget: int) -> Decomposition:
    d = direction.vector
    dec = Decomposition(S, direction, "periodic", budget)
    germs = {}
    for c in S.singular:
        lst = [(g, "E") for g in S.germs_in_direction(c, d)]
        lst += [(g, "W") for g in S.germs_in_direction(c, -d)]
        lst.sort(key=lambda gt: gt[0].corner)
        for i in range(len(lst)):
            if lst[i][1] == lst[i - 1][1]:
                raise AssertionError("separatrix germs do not alternate")
        germs[c] = lst
    saddles, start_of = [], {}
    for c in S.singular:
        for g, kind in germs[c]:
            if kind != "E":
                continue
            sc = trace_separatrix(S, g, budget)
            if isinstance(sc, TraceExceeded):
                dec.status = "budget"
                return dec
            start_of[(g.vclass, g.corner)] = len(saddles)
            saddles.append(sc)
    dec.saddles = saddles
    pos = {}
    for c, lst in germs.items():
        for i, (g, _) in enumerate(lst):
            pos[(c, g.corner)] = i
    n = len(saddles)
    nxt_top, nxt_bot = [None] * n, [None] * n
    for i, s in enumerate(saddles):
        c = s.end.vclass
        lst = germs[c]
        k = pos[(c, s.end.corner)]
        g_bot = lst[k - 1][0]
        g_top = lst[(k + 1) % len(lst)][0]
        nxt_bot[i] = start_of[(c, g_bot.corner)]
        nxt_top[i] = start_of[(c, g_top.corner)]
    dec.next_top, dec.next_bottom = nxt_top, nxt_bot
    dec.germ_lists = germs
    dec.germ_pos = pos
    dec.start_of = start_of
    # mu of each saddle: holonomy = mu * d
    if d.x:
        mus = [s.holonomy.x / d.x for s in saddles]
    else:
        mus = [s.holonomy.y / d.y for s in saddles]
    dec.mus = mus
    bottom_cycles = _cycles(nxt_bot)
    top_cycles = _cycles(nxt_top)
    top_of = {}
    for j, cyc in enumerate(top_cycles):
        for s in cyc:
            top_of[s] = j
    seg_index = {}
    for i, s in enumerate(saddles):
        for t, a, b, sa, sb in s.params():
            seg_index.setdefault(t, []).append((i, a, b, sa, sb))
    above, below = [None] * n, [None] * n
    cylinders = []
    used_tops = set()
    for cyc in bottom_cycles:
        B = [ZERO]
        for s in cyc:
            B.append(B[-1] + mus[s])
        mu = B[-1]
        hit = _perpendicular_hit(S, dec, cyc[0], seg_index, budget)
        if hit is None:
            dec.status = "budget"
            return dec
        s_hit, off_hit, eta, x_b = hit
        j = top_of[s_hit]
        tcyc = top_cycles[j]
        if j in used_tops:
            raise AssertionError("top boundary matched twice")
        used_tops.add(j)
        T = [ZERO]
        for s in tcyc:
            T.append(T[-1] + mus[s])
        if T[-1] != mu:
            raise AssertionError("top and bottom chains have different lengths")
        k = tcyc.index(s_hit)
        delta = fmod(T[k] + off_hit - x_b, mu)
        ci = len(cylinders)
        cyl = Cylinder(dec, ci, "nondegenerate", bottom=tuple(cyc), top=tuple(tcyc),
                       B=tuple(B), T=tuple(T), mu=mu, eta=eta, delta=delta)
        cylinders.append(cyl)
        for kk, s in enumerate(cyc):
            above[s] = (ci, B[kk])
        for kk, s in enumerate(tcyc):
            below[s] = (ci, T[kk])
    dec.cylinders = cylinders
    dec.above, dec.below = above, below
    total = sum((c.area for c in cylinders), ZERO)
    if total != S.area:
        raise AssertionError(f"cylinder areas {total} do not add up to {S.area}")
    return dec


def _cycles(perm):
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        out.append(cyc)
    return out


_PERP_FRACTIONS = [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 5), Fraction(3, 7),
                   Fraction(5, 11), Fraction(7, 13), Fraction(1, 17), Fraction(16, 19)]


def _perpendicular_hit(S, dec, s0, seg_index, budget):
    """Shoot perpendicular to the direction from a point of bottom saddle
    s0 until the first saddle of the direction is met.

    Returns (saddle, offset along it in direction units, eta, x) where x is
    the frame coordinate of the start point.
    """
    d = dec.d
    n = d.perp()
    sad = dec.saddles[s0]
    mu0 = dec.mus[s0]
    vhits = getattr(dec, "_vertex_hits", None)
    if vhits is None:
        # saddle connections passing through regular vertices
        vhits = {}
        for t, segs in seg_index.items():
            for i, a, b, sa, sb in segs:
                for p, frac in ((a, sa), (b, sb)):
                    if p in S.tri_pts[t] and 0 < frac < 1:
                        cv = S.corner_class[t][S.tri_pts[t].index(p)]
                        vhits.setdefault(cv, {})[i] = frac
        dec._vertex_hits = vhits
    for r in _PERP_FRACTIONS:
        x_b = mu0 * as_fe(r)
        st = S.trace(sad.start, d, budget=budget, s_max=x_b)
        if not isinstance(st, TraceStop) or st.point in S.tri_pts[st.tri]:
            continue
        origin = st.point

        def visit(t, p_in, p_out, off):
            best = None
            rr = p_out - p_in
            for i, a, b, sa, sb in seg_index.get(t, ()):
                q = b - a
                den = wedge(rr, q)
                if not den:
                    continue
                lam = wedge(a - p_in, q) / den
                if lam.sign() < 0 or lam > 1:
                    continue
                m = wedge(a - p_in, rr) / den
                if m.sign() < 0 or m > 1:
                    continue
                if wedge(d, p_in + rr * lam + off - origin).sign() <= 0:
                    continue
                if best is None or lam < best[0]:
                    best = (lam, i, m, a, b, sa, sb)
            if best is None:
                if p_out in S.tri_pts[t]:
                    cv = S.corner_class[t][S.tri_pts[t].index(p_out)]
                    if cv in vhits and wedge(d, p_out + off - origin).sign() > 0:
                        (i, frac), = vhits[cv].items()
                        return ("hit", i, frac * dec.mus[i], wedge(d, p_out + off - origin))
                return None
            lam, i, m, a, b, sa, sb = best
            pt = p_in + rr * lam
            for j in range(3):
                if S.tri_pts[t][j] == pt and S.is_singular(S.corner_class[t][j]):
                    return ("zero",)
            frac = sa + (sb - sa) * m
            disp = pt + off - origin
            return ("hit", i, frac * dec.mus[i], wedge(d, disp))

        res = S.trace((st.tri, origin), n, budget=budget, visit=visit)
        if isinstance(res, tuple) and res[0] == "hit":
            return res[1], res[2], res[3], x_b
    return None


# ---------------------------------------------------------------- isomorphism


def decompositions_isomorphic(d1: Decomposition, d2: Decomposition) -> bool:
    """True if some translation equivalence carries one periodic
    decomposition onto the other (same direction vector assumed).

    A seed saddle is matched against every candidate and the matching is
    propagated through cylinders; a cylinder fixes the images of all its
    boundary saddles once the shift between the two frames is known.
    """
    if not (d1.periodic and d2.periodic):
        raise PreconditionFailed("both decompositions must be periodic")
    n = len(d1.saddles)
    if n != len(d2.saddles) or len(d1.cylinders) != len(d2.cylinders):
        return False
    if n == 0:
        return True
    for t0 in range(n):
        if d1.mus[0] == d2.mus[t0] and _propagate(d1, d2, t0):
            return True
    return False


def _propagate(d1, d2, t0) -> bool:
    f, g = {0: t0}, {}
    queue = [0]
    while queue:
        s = queue.pop()
        t = f[s]
        for side in ("above", "below"):
            c1, p1 = getattr(d1, side)[s]
            c2, p2 = getattr(d2, side)[t]
            C1, C2 = d1.cylinders[c1], d2.cylinders[c2]
            if C1.mu != C2.mu or C1.eta != C2.eta:
                return False
            if side == "above":
                shift = fmod(p2 - p1, C1.mu)
            else:
                shift = fmod((p2 - C2.delta) - (p1 - C1.delta), C1.mu)
            if c1 in g:
                if g[c1] != (c2, shift):
                    return False
                continue
            g[c1] = (c2, shift)
            pairs = []
            for k, a in enumerate(C1.bottom):
                x = fmod(C1.B[k] + shift, C1.mu)
                if x not in C2.B[:-1]:
                    return False
                pairs.append((a, C2.bottom[C2.B.index(x)]))
            for k, a in enumerate(C1.top):
                x = fmod(C1.T[k] - C1.delta + shift + C2.delta, C1.mu)
                if x not in C2.T[:-1]:
                    return False
                pairs.append((a, C2.top[C2.T.index(x)]))
            for a, b in pairs:
                if a in f:
                    if f[a] != b:
                        return False
                elif d1.mus[a] != d2.mus[b]:
                    return False
                else:
                    f[a] = b
                    queue.append(a)
    return len(f) == len(d1.saddles) and len(set(f.values())) == len(f) and len(g) == len(d1.cylinders)


def translation_isomorphic(S1: Surface, S2: Surface, budget: int = DEFAULT_BUDGET) -> bool:
    """Translation equivalence test through a common periodic direction
    (horizontal when possible, otherwise a short saddle direction of S1)."""
    if S1.area != S2.area or S1.stratum != S2.stratum or len(S1.marked) != len(S2.marked):
        return False
    candidates = [Direction(Vec2(1, 0))]
    candidates += [dr for dr in saddle_directions(S1, S1.area * 4)[:8] if dr not in candidates]
    for dr in candidates:
        d1 = _raw_decomposition(S1, dr, budget)
        if not d1.periodic:
            continue
        d2 = _raw_decomposition(S2, dr, budget)
        if not d2.periodic:
            return False
        return decompositions_isomorphic(d1, d2)
    raise PreconditionFailed("no periodic reference direction found")


# ----------------------------------------------------------------- involution


class Involution:
    """The hyperelliptic involution (derivative -Id).

    It is described through a reference periodic direction: on every
    cylinder of that direction it is the rotation by pi about the frame
    point ``(x0, eta/2)``.  ``map_germ`` transports germs at singular points.
    """

    derivative = ((-1, 0), (0, -1))

    def __init__(self, dec: Decomposition, x0s, vertex_action, fixed_points):
        self.reference = dec
        self.surface = dec.surface
        self.x0 = tuple(x0s)
        self.vertex_action = dict(vertex_action)
        self.fixed_point_count = fixed_points

    def _bottom_index(self, cyl, x):
        for k, b in enumerate(cyl.B[:-1]):
            if b == x:
                return k
        raise AssertionError("no bottom vertex at this position")

    def _top_index_ending(self, cyl, x):
        tc = fmod(x + cyl.delta, cyl.mu)
        for k in range(len(cyl.top)):
            if fmod(cyl.T[k + 1], cyl.mu) == tc:
                return k
        raise AssertionError("no top vertex at this position")

    def map_germ(self, g: Germ) -> Germ:
        S, dec = self.surface, self.reference
        lst = dec.germ_lists[g.vclass]
        key = S.germ_key()
        # last reference germ at or before g
        best = None
        for i, (h, kind) in enumerate(lst):
            if key(h) <= key(g):
                best = i
        if best is None:
            best = len(lst) - 1
        h, kind = lst[best]
        exact = S.same_germ(h, g)
        if kind == "E":
            s = dec.start_of[(h.vclass, h.corner)]
            c, pos = dec.above[s]
            cyl = dec.cylinders[c]
            x_img = fmod(2 * self.x0[c] - pos, cyl.mu)
            k = self._top_index_ending(cyl, x_img)
            boundary = dec.saddles[cyl.top[k]].end
        else:
            s = _arriving(dec, h)
            c, tpos = dec.below[s]
            cyl = dec.cylinders[c]
            x_end = fmod(tpos + dec.mus[s] - cyl.delta, cyl.mu)
            x_img = fmod(2 * self.x0[c] - x_end, cyl.mu)
            k = self._bottom_index(cyl, x_img)
            boundary = dec.saddles[cyl.bottom[k]].start
        if exact:
            return boundary
        return S.germ_sector_walk(boundary, -g.vec)

    def is_invariant(self, s: SaddleConnection) -> bool:
        return self.surface.same_germ(self.map_germ(s.start), s.end)

    def map_saddle(self, s: SaddleConnection) -> SaddleConnection:
        """Image of s (as an oriented saddle connection)."""
        g = self.map_germ(s.start)
        r = trace_separatrix(self.surface, g)
        return r

    def triangle_pairing(self):
        """A triangulation adapted to the reference direction together with
        the pairing induced by the involution.

        Each cylinder is cut at the frame coordinates of all its boundary
        vertices and their images; every resulting strip is split along its
        rising diagonal.  Triangles are given in frame coordinates
        ``(cylinder, ((x, y), (x, y), (x, y)))``.
        """
        dec = self.reference
        tris, pairing = [], {}
        for c, cyl in enumerate(dec.cylinders):
            mu = cyl.mu
            cuts = set()
            for b in cyl.B[:-1]:
                cuts.add(fmod(b, mu))
                cuts.add(fmod(2 * self.x0[c] - b, mu))
            for t in cyl.T[:-1]:
                x = fmod(t - cyl.delta, mu)
                cuts.add(x)
                cuts.add(fmod(2 * self.x0[c] - x, mu))
            xs = sorted(cuts)
            base = len(tris)
            m = len(xs)
            for i in range(m):
                x_a = xs[i]
                x_b = xs[i + 1] if i + 1 < m else xs[0] + mu
                lo = ((x_a, ZERO), (x_b, ZERO), (x_b, cyl.eta))
                hi = ((x_a, ZERO), (x_b, cyl.eta), (x_a, cyl.eta))
                tris.append((c, lo))
                tris.append((c, hi))
            for i in range(m):
                x_a = xs[i]
                x_b = xs[i + 1] if i + 1 < m else xs[0] + mu
                img_a = fmod(2 * self.x0[c] - x_b, mu)
                j = xs.index(img_a)
                pairing[base + 2 * i] = base + 2 * j + 1
                pairing[base + 2 * i + 1] = base + 2 * j
        return tris, pairing


def _arriving(dec, w: Germ) -> int:
    for i, s in enumerate(dec.saddles):
        if s.end.vclass == w.vclass and s.end.corner == w.corner:
            return i
    raise AssertionError("no saddle arrives at this germ")


def _involution_from(dec: Decomposition) -> Involution | None:
    S = dec.surface
    cands = []
    for cyl in dec.cylinders:
        opts = []
        for k in range(len(cyl.top)):
            f = fmod(cyl.T[k] - cyl.delta, cyl.mu)
            opts.append(f / 2)
        cands.append(opts)
    want_swap = S.genus == 1 or len(S.zeros) == 2
    sols = []
    for combo in product(*cands):
        res = _check_involution(dec, combo)
        if res is None:
            continue
        vmap, invariant_count = res
        fixed_sing = sum(1 for c, v in vmap.items() if c == v)
        if want_swap and fixed_sing:
            continue
        if not want_swap and fixed_sing != len(S.singular):
            continue
        fixed = 2 * len(dec.cylinders) + invariant_count + fixed_sing
        if fixed != 2 * S.genus + 2:
            continue
        sols.append((combo, vmap, fixed))
    if not sols:
        return None
    combo, vmap, fixed = sols[0]
    return Involution(dec, combo, vmap, fixed)


def _check_involution(dec, combo):
    """Consistency of per-cylinder rotations along shared saddles."""
    img_below = {}
    img_above = {}
    vmap = {}
    for c, cyl in enumerate(dec.cylinders):
        x0 = combo[c]
        for k, s in enumerate(cyl.bottom):
            # bottom saddle [B_k, B_k+1] goes to top segment ending at 2x0 - B_k
            x_end = fmod(2 * x0 - cyl.B[k], cyl.mu)
            tc = fmod(x_end + cyl.delta, cyl.mu)
            hit = None
            for j, t in enumerate(cyl.top):
                if fmod(cyl.T[j + 1], cyl.mu) == tc:
                    hit = t
            if hit is None or dec.mus[hit] != dec.mus[s]:
                return None
            img_above[s] = hit
        for j, t in enumerate(cyl.top):
            x_end = fmod(cyl.T[j + 1] - cyl.delta, cyl.mu)
            x_img = fmod(2 * x0 - x_end, cyl.mu)
            hit = None
            for k, s in enumerate(cyl.bottom):
                if cyl.B[k] == x_img:
                    hit = s
            if hit is None or dec.mus[hit] != dec.mus[t]:
                return None
            img_below[t] = hit
    for s in range(len(dec.saddles)):
        if img_above.get(s) is None or img_above[s] != img_below.get(s):
            return None
    invariant = 0
    for s, t in img_above.items():
        sd, td = dec.saddles[s], dec.saddles[t]
        if img_above.get(t) != s:
            return None
        if s == t:
            invariant += 1
        for a, b in ((sd.start.vclass, td.end.vclass), (sd.end.vclass, td.start.vclass)):
            if vmap.setdefault(a, b) != b:
                return None
    return vmap, invariant


def compute_involution(S: Surface, budget: int = DEFAULT_BUDGET) -> Involution:
    """The hyperelliptic involution of a genus-2 surface (or the involution
    of a torus exchanging its two marked points)."""

    def build():
        for d in _reference_directions(S):
            dec = _raw_decomposition(S, Direction(d), budget)
            if not dec.periodic:
                continue
            inv = _involution_from(dec)
            if inv is not None:
                return inv
        raise NotFound("no involution with derivative -Id found")

    return S.cached("involution", build)


def _reference_directions(S):
    yield Vec2(1, 0)
    yield Vec2(0, 1)
    seen = {Direction(Vec2(1, 0)), Direction(Vec2(0, 1))}
    r2 = S.area * 4
    for _ in range(4):
        for sc in enumerate_saddle_connections(S, r2):
            dr = Direction(sc.holonomy)
            if dr not in seen:
                seen.add(dr)
                yield sc.holonomy
        r2 = r2 * 4


# ------------------------------------------------------------ decomposition


def cylinder_decomposition(S: Surface, d, budget: int = DEFAULT_BUDGET,
                           with_degenerates: bool = True) -> Decomposition:
    """Cylinder decomposition of S in direction d (a Vec2 or Direction)."""
    direction = d if isinstance(d, Direction) else Direction(d)
    cache = S.cached("decompositions", dict)
    key = (direction.key, budget, with_degenerates)
    if key in cache:
        return cache[key]
    dec = _raw_decomposition(S, direction, budget)
    if dec.periodic and with_degenerates and S.genus == 2:
        _attach_degenerates(S, dec, budget)
    cache[key] = dec
    return dec


def _attach_degenerates(S, dec, budget):
    inv = compute_involution(S, budget)
    n = len(dec.saddles)
    invariant = [inv.is_invariant(s) for s in dec.saddles]
    dec.invariant = invariant
    degs = []
    seen = set()
    for s1 in range(n):
        s2 = dec.next_top[s1]
        if s2 == s1 or not invariant[s1] or not invariant[s2]:
            continue
        if dec.next_bottom[s2] != s1:
            continue
        pair = tuple(sorted((s1, s2)))
        if pair in seen:
            continue
        seen.add(pair)
        mu = dec.mus[s1] + dec.mus[s2]
        degs.append(Cylinder(dec, len(degs), "degenerate", s1=pair[0], s2=pair[1], mu=mu,
                             eta=ZERO, join=(s1, s2)))
    dec.degenerates = degs


# ------------------------------------------------------------- enumeration


def _seg_dist2(P: Vec2, Q: Vec2) -> FieldElement:
    """Squared distance from the origin to the segment [P, Q]."""
    e = Q - P
    ee = dot(e, e)
    s = -dot(P, e)
    if s.sign() <= 0:
        return P.norm2()
    if s >= ee:
        return Q.norm2()
    w = wedge(P, e)
    return w * w / ee


def _arrival_germ(S, t, j, v):
    """Germ at corner (t, j) pointing back along a ray of direction v that
    arrives there."""
    back = -v
    cn = (t, j)
    _, e = S.corner_sector(t, j)
    if not wedge(back, e) and dot(back, e).sign() > 0:
        cn = S.next_corner(t, j)
    c, k = S.corner_pos[cn]
    return Germ(c, k, back)


def _unfold_corner(S, c, k, t, i, R2, out, budget):
    pts = S.tri_pts[t]
    o = pts[i]
    lo = pts[(i + 1) % 3] - o
    hi = pts[(i + 2) % 3] - o
    _candidate(S, c, k, t, (i + 1) % 3, lo, R2, out, budget)
    stack = [(t, (i + 1) % 3, -o, lo, hi)]
    while stack:
        tt, e, off, lo, hi = stack.pop()
        P = S.tri_pts[tt][e] + off
        Q = S.tri_pts[tt][(e + 1) % 3] + off
        if _seg_dist2(P, Q) > R2:
            continue
        t2, e2 = S.tri_glue[tt][e]
        p2 = S.tri_pts[t2]
        off2 = Q - p2[e2]
        j = (e2 + 2) % 3
        v = p2[j] + off2
        right = wedge(lo, v).sign()
        left = wedge(v, hi).sign()
        if right > 0 and left > 0:
            _candidate(S, c, k, t2, j, v, R2, out, budget)
            stack.append((t2, (e2 + 1) % 3, off2, lo, v))
            stack.append((t2, j, off2, v, hi))
        elif right <= 0:
            stack.append((t2, j, off2, lo, hi))
        else:
            stack.append((t2, (e2 + 1) % 3, off2, lo, hi))


def _candidate(S, c, k, t, j, v, R2, out, budget):
    if v.norm2() > R2:
        return
    start = Germ(c, k, v)
    vc = S.corner_class[t][j]
    if S.is_singular(vc):
        out.append(SaddleConnection(start, _arrival_germ(S, t, j, v), v, surface=S))
        return
    # a regular vertex lies on the ray: follow it to the next singular point
    r = S.trace(start, v, budget=budget)
    if isinstance(r, TraceHit) and r.holonomy.norm2() <= R2:
        out.append(SaddleConnection(start, r.arrival, r.holonomy, surface=S))


def enumerate_saddle_connections(S: Surface, max_len2, budget: int = DEFAULT_BUDGET):
    """All saddle connections with |holonomy|^2 <= max_len2, one per
    orientation class (holonomy in the upper half plane), sorted
    lexicographically by holonomy.

    Every corner at every singular point is unfolded: the visible wedge is
    developed triangle by triangle and split at each vertex it meets;
    branches whose entry edge is farther than sqrt(max_len2) are dropped.
    """
    max_len2 = as_fe(max_len2)
    if max_len2.sign() <= 0:
        raise PreconditionFailed("maxLen2 must be positive")
    cache = S.cached("saddles", dict)
    if max_len2 in cache:
        return cache[max_len2]
    for r2 in sorted(cache, key=float):
        if r2 >= max_len2:
            out = [s for s in cache[r2] if s.holonomy.norm2() <= max_len2]
            cache[max_len2] = out
            return out
    found = {}
    for c in S.singular:
        for k, (t, i) in enumerate(S.class_corners[c]):
            raw = []
            _unfold_corner(S, c, k, t, i, max_len2, raw, budget)
            for sc in raw:
                cs = sc.canonical()
                found.setdefault(cs.key, cs)
    out = sorted(found.values(), key=_saddle_order)
    cache[max_len2] = out
    return out


def _saddle_order(s):
    h = s.holonomy
    return (h.x, h.y, s.start.vclass, s.start.corner)


def saddle_directions(S: Surface, max_len2):
    """Distinct directions of saddle connections up to the given length,
    sorted by angle in [0, pi)."""
    dirs = {}
    for sc in enumerate_saddle_connections(S, max_len2):
        dr = Direction(sc.holonomy)
        dirs.setdefault(dr, dr)
    return sorted(dirs, key=lambda dr: dr.sort_key())


# ------------------------------------------------------------- slit tori


class SlitSplit(NamedTuple):
    """Two cylinders of a slit torus in a lattice direction.

    ``containing`` is None when the slit lies on a closed leaf.
    """

    disjoint: Cylinder
    containing: Cylinder | None
    containing_area: FieldElement
    direction: Vec2


def _slit_data(T: Surface):
    if T.meta.get("kind") != "slit_torus":
        raise PreconditionFailed("not a slit torus")
    v1, v2 = T.meta["lattice"]
    u = T.meta["slit"]
    return v1, v2, u, wedge(v1, v2)


def slit_disjoint_cylinder(T: Surface, pq) -> SlitSplit:
    """Split a slit torus along the closed geodesics of lattice direction
    p*v1 + q*v2 through the slit end points.

    Succeeds iff |w ^ u| < covolume (for the unit square lattice and slit
    t*(1, alpha) this is t*|p*alpha - q| < 1); the slit-containing cylinder
    then has area |w ^ u|.
    """
    p, q = (int(x) for x in pq)
    if gcd(p, q) != 1:
        raise PreconditionFailed("(p, q) must be primitive")
    v1, v2, u, covol = _slit_data(T)
    w = v1 * p + v2 * q
    val = abs(wedge(w, u))
    if val >= covol:
        raise NoRoom(f"|w^u| = {val} is not below the covolume {covol}")
    dec = cylinder_decomposition(T, w)
    if not dec.periodic:
        raise AssertionError("lattice direction did not close")
    if not val:
        cyl = max(dec.cylinders, key=lambda c: float(c.area))
        return SlitSplit(cyl, None, ZERO, dec.d)
    c0 = T.poly_corner_class(0, 0)
    (g, _), = [(g, kind) for g, kind in dec.germ_lists[c0] if kind == "E"]
    s = dec.start_of[(c0, g.corner)]
    if wedge(dec.d, u).sign() > 0:
        inside = dec.cylinders[dec.above[s][0]]
    else:
        inside = dec.cylinders[dec.below[s][0]]
    other = [c for c in dec.cylinders if c is not inside]
    if len(other) != 1:
        raise AssertionError("expected two cylinders")
    return SlitSplit(other[0], inside, inside.area, dec.d)


def gauss_reduce(v1: Vec2, v2: Vec2):
    """Lagrange-Gauss reduction; returns (b1, b2, M) with |b1| <= |b2| and
    (b1, b2) = M applied to (v1, v2) (rows of integer coefficients)."""
    b1, b2 = v1, v2
    m = [[1, 0], [0, 1]]
    while True:
        if b2.norm2() < b1.norm2():
            b1, b2 = b2, b1
            m = [m[1], m[0]]
        r = dot(b1, b2) / b1.norm2()
        k = (r + Fraction(1, 2)).floor()
        if not k:
            return b1, b2, m
        b2 = b2 - b1 * k
        m[1] = [m[1][0] - k * m[0][0], m[1][1] - k * m[0][1]]


def lattice_vectors(v1: Vec2, v2: Vec2, bound2):
    """Primitive lattice vectors w (one per sign) with |w|^2 <= bound2, as
    (w, (p, q)) with w = p*v1 + q*v2, sorted by length then coefficients."""
    b1, b2, m = gauss_reduce(v1, v2)
    covol = abs(wedge(b1, b2))
    B = float(bound2) ** 0.5
    nmax = int(float(b1.norm2()) ** 0.5 * B / float(covol)) + 2
    mmax = int(float(b2.norm2()) ** 0.5 * B / float(covol)) + 2
    out = []
    for i in range(-mmax, mmax + 1):
        for j in range(-nmax, nmax + 1):
            if gcd(i, j) != 1:
                continue
            p = i * m[0][0] + j * m[1][0]
            q = i * m[0][1] + j * m[1][1]
            w = v1 * p + v2 * q
            if not _canon_vec(w) or w.norm2() > bound2:
                continue
            out.append((w, (p, q)))
    out.sort(key=lambda wc: (wc[0].norm2(), wc[1]))
    return out


def sqrt_lower_bound(num: int, den: int, digits: int = 30) -> Fraction:
    """A rational r <= sqrt(num/den)."""
    from math import isqrt

    scale = 10 ** digits
    return Fraction(isqrt(num * scale * scale // den), scale)


def l1_squared_parts(L):
    """L1^2 = 9 * max(A, B) with A = L^2 + 1/L^2 and B = 13*sqrt(3)/6.

    Returns (9*A, certified rational lower bound of 9*B, exact 9*B).
    """
    L = as_fe(L)
    A = L * L + ONE / (L * L)
    B = FieldElement(0, 13, 6, 3)
    return A * 9, 9 * sqrt_lower_bound(507, 36), B * 9


def within_l1(x2, L) -> bool:
    """Certified test x2 <= L1^2 (conservative: a True answer is a proof)."""
    a9, b9_lo, b9 = l1_squared_parts(L)
    try:
        if x2 <= a9:
            return True
    except Exception:
        pass
    try:
        return x2 <= b9
    except Exception:
        return x2 <= b9_lo


def bounded_circumference_cylinder(T: Surface, L) -> Cylinder:
    """A cylinder disjoint from the slit with area >= 1/2 and circumference
    at most L1 = 3*max(f(L), f(2*delta)), f(x) = sqrt(x^2 + 1/x^2),
    delta = (3/4)^(1/4).

    First branch: a shortest lattice vector v when the slit is short and
    |u ^ v| <= 1/2.  Otherwise the primitive lattice vectors of length at
    most L1 are scanned by length for one with |w ^ u| <= 1/2, which the
    remaining branches of the existence argument guarantee.
    """
    v1, v2, u, covol = _slit_data(T)
    if covol != 1:
        raise PreconditionFailed("slit torus must have unit area")
    L = as_fe(L)
    if u.norm2() >= L * L:
        raise PreconditionFailed("slit is not shorter than L")
    half = Fraction(1, 2)
    b1, _, m = gauss_reduce(v1, v2)
    # |u| <= 1/(2 delta)  <=>  |u|^2 <= sqrt(3)/6; a rational lower bound suffices
    if u.norm2() <= sqrt_lower_bound(3, 36) and abs(wedge(u, b1)) <= half:
        pq = tuple(m[0])
        return slit_disjoint_cylinder(T, pq).disjoint
    a9, b9_lo, _ = l1_squared_parts(L)
    bound = a9 if a9 >= b9_lo else as_fe(b9_lo)
    for w, pq in lattice_vectors(v1, v2, bound):
        if abs(wedge(w, u)) <= half and within_l1(w.norm2(), L):
            return slit_disjoint_cylinder(T, pq).disjoint
    raise AssertionError("no cylinder within the L1 bound; the existence argument failed")


# -------------------------------------------------------- deformation oracle


class DeformedSurface:
    """A surface in which a degenerate cylinder has been opened.

    ``surface`` is rebuilt from the cylinders of the direction (one polygon
    per cylinder, in its frame) plus the inserted polygon
    ``opened_polygon`` of height t.
    """

    def __init__(self, surface, dec, opened_polygon, t):
        self.surface = surface
        self.decomposition = dec
        self.opened_polygon = opened_polygon
        self.t = t

    def frame_point(self, c: int, x, y):
        """(tri, point) of the frame point (x, y) of cylinder c of the
        original decomposition."""
        dec = self.decomposition
        cyl = dec.cylinders[c]
        shift = cyl.delta * y / cyl.eta
        xx = fmod(x + shift, cyl.mu) - shift
        return self.surface.locate(c, _frame_to_plane(dec, xx, y))


def _frame_to_plane(dec, x, y) -> Vec2:
    n = dec.d.perp()
    return dec.d * x + n * (y / dec.dd)


def cylinder_polygons(dec: Decomposition):
    """One polygon per cylinder (frame coordinates mapped to the plane) and
    the gluings that reassemble the surface."""
    polys, edge_of = [], {}
    F = lambda x, y: _frame_to_plane(dec, x, y)  # noqa: E731
    for ci, cyl in enumerate(dec.cylinders):
        m, n = len(cyl.bottom), len(cyl.top)
        pts = [F(cyl.B[k], ZERO) for k in range(m)] + [F(cyl.mu, ZERO)]
        pts += [F(cyl.T[k] - cyl.delta, cyl.eta) for k in range(n, -1, -1)]
        polys.append(pts)
        for k, s in enumerate(cyl.bottom):
            edge_of[("bottom", s)] = (ci, k)
        for j in range(n):
            edge_of[("top", cyl.top[n - j - 1])] = (ci, m + 1 + j)
        edge_of[("right", ci)] = (ci, m)
        edge_of[("left", ci)] = (ci, m + n + 1)
    return polys, edge_of


def deformation_oracle(S: Surface, degC: Cylinder, t) -> DeformedSurface | Surface:
    """Open the degenerate cylinder degC into a simple cylinder of the same
    circumference and height t (measured as wedge(d, .) in the primitive
    direction vector d).  t = 0 returns S itself.

    Test oracle only; the construction is exact.
    """
    t = as_fe(t)
    if degC.kind != "degenerate":
        raise PreconditionFailed("cylinder is not degenerate")
    if t.sign() < 0:
        raise PreconditionFailed("t must be non-negative")
    if not t:
        return S
    dec = degC.decomposition
    if t >= min(c.eta for c in dec.cylinders):
        raise TooLargeT("t must be smaller than every cylinder height of the direction")
    polys, edge_of = cylinder_polygons(dec)
    gl = []
    s1, s2 = degC.join
    for s in range(len(dec.saddles)):
        if s in (s1, s2):
            continue
        a, b = edge_of[("bottom", s)], edge_of[("top", s)]
        gl.append((a[0], a[1], b[0], b[1]))
    for ci in range(len(dec.cylinders)):
        a, b = edge_of[("right", ci)], edge_of[("left", ci)]
        gl.append((a[0], a[1], b[0], b[1]))
    m1 = dec.mus[s1]
    mu = degC.mu
    F = lambda x, y: _frame_to_plane(dec, x, y)  # noqa: E731
    R = [F(ZERO, ZERO), F(m1, ZERO), F(mu, ZERO), F(mu, t), F(m1, t), F(ZERO, t)]
    r = len(polys)
    polys.append(R)
    for edge_bottom, edge_top, s in ((0, 4, s1), (1, 3, s2)):
        a = edge_of[("top", s)]
        gl.append((r, edge_bottom, a[0], a[1]))
        b = edge_of[("bottom", s)]
        gl.append((r, edge_top, b[0], b[1]))
    gl.append((r, 2, r, 5))
    meta = {"kind": "deformed", "t": str(t)}
    St = Surface(polys, gl, mode=S.mode, meta=meta)
    return DeformedSurface(St, dec, r, t)
