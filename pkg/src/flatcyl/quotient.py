"""Prototypes, direction classification and the quotient of the cylinder
graph by the affine group, for eigenform surfaces in H(2).

Every two-cylinder direction is brought to the normal form of a prototype
``(a, b, c, e)``: a ``lambda x lambda`` square glued on top of the
parallelogram spanned by ``(b, 0)`` and ``(a, c)``.  Cylinders in the same
affine orbit get the same label, so vertices of the quotient are labels and
edges are orbits of disjoint pairs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import NamedTuple

from .errors import (
    BadDiscriminant,
    NormalizationFailed,
    NotPeriodic,
    PreconditionFailed,
    SearchBudgetTooSmall,
)
from .exactnum import Direction, FieldElement, Vec2, as_fe, dot, wedge
from .flow import (
    Cylinder,
    cylinder_decomposition,
    enumerate_saddle_connections,
    fmod,
    saddle_directions,
    translation_isomorphic,
)
from .surface import DEFAULT_BUDGET, SCHEMA, Surface, build_prototype_surface, six_square_surface
from .topology import disjoint, intersection_number

__all__ = [
    "Prototype",
    "VertexLabel",
    "DirectionClass",
    "QuotientGraph",
    "enumerate_prototypes",
    "is_prototype",
    "classify_direction",
    "quotient_graph",
    "six_square_edge_experiment",
    "GOLDEN_EDGES",
    "matches_golden",
]


class Prototype(NamedTuple):
    a: int
    b: int
    c: int
    e: int

    @property
    def D(self) -> int:
        return self.e * self.e + 4 * self.b * self.c

    @property
    def lam(self) -> FieldElement:
        return FieldElement(self.e, 1, 2, self.D)

    def __str__(self):
        return f"({self.a},{self.b},{self.c},{self.e})"


def is_prototype(a: int, b: int, c: int, e: int, D: int | None = None) -> bool:
    """The six defining conditions (and ``D = e^2 + 4bc`` if D is given)."""
    if D is not None and D != e * e + 4 * b * c:
        return False
    return (b > 0 and c > 0 and gcd(b, c) > a >= 0 and b > c + e
            and gcd(gcd(a, b), gcd(c, e)) == 1)


def _check_disc(D: int):
    if not isinstance(D, int) or D < 5 or D % 4 not in (0, 1):
        raise BadDiscriminant(f"D={D}: need D >= 5 and D = 0, 1 mod 4")


def enumerate_prototypes(D: int) -> list[Prototype]:
    """All prototypes of discriminant D, sorted lexicographically."""
    _check_disc(D)
    out = []
    r = isqrt(D)
    for e in range(-r, r + 1):
        rest = D - e * e
        if rest <= 0 or rest % 4:
            continue
        bc = rest // 4
        for b in range(1, bc + 1):
            if bc % b:
                continue
            c = bc // b
            for a in range(gcd(b, c)):
                if is_prototype(a, b, c, e):
                    out.append(Prototype(a, b, c, e))
    return sorted(out)


# ------------------------------------------------------------ classification


class VertexLabel(NamedTuple):
    kind: str            # "TwoCyl", "OneCyl" or "Degenerate"
    prototype: Prototype | None
    slot: str            # "simple", "nonsimple", or a class id

    def __str__(self):
        if self.kind == "TwoCyl":
            return f"TwoCyl{self.prototype}:{self.slot}"
        return f"{self.kind}:{self.slot}"


class DirectionClass(NamedTuple):
    """Classification of one periodic direction."""
    direction: Direction
    kind: str
    prototype: Prototype | None
    labels: dict         # cylinder key -> VertexLabel
    frame: tuple | None  # normal-form matrix for the simple cylinder
    shear: Fraction | None


def _q(x: FieldElement, what: str) -> Fraction:
    if not x.is_rational:
        raise NormalizationFailed(f"{what} is not rational")
    return x.to_fraction()


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _two_cylinder_form(dec):
    """Prototype and normal-form frame of a two-cylinder decomposition."""
    c0, c1 = dec.cylinders
    if c0.simple == c1.simple:
        raise NormalizationFailed("expected exactly one simple cylinder")
    sc, bc = (c0, c1) if c0.simple else (c1, c0)
    mu1, eta1, mu2, eta2 = sc.mu, sc.eta, bc.mu, bc.eta
    beta, tau = sc.bottom[0], sc.top[0]
    twist1 = fmod(-sc.delta, mu1)
    cyl, p_tau = dec.above[tau]
    cyl2, t_beta = dec.below[beta]
    if cyl != bc.index or cyl2 != bc.index:
        raise NormalizationFailed("simple cylinder is not glued to the other one")
    dx = fmod(t_beta - bc.delta - p_tau, mu2)
    sigma = -twist1 / eta1
    dx = dx + sigma * eta2
    c0q = _q(mu1 * eta2 / (mu2 * eta1), "height ratio")
    e0q = _q(mu1 / mu2 - eta2 / eta1, "prototype e")
    L = _lcm(c0q.denominator, e0q.denominator)
    a0 = dx / mu2
    a0q = _q(a0, "twist") * L
    L *= a0q.denominator
    b, c, e = L, int(c0q * L), int(e0q * L)
    a = int(a0q * a0q.denominator) % b
    g = gcd(b, c)
    # shear by whole square twists: a -> a + s*c (mod b); pick the residue in [0, g)
    s_shift = 0
    for s in range(b):
        if (a + s * c) % b < g:
            s_shift = s
            a = (a + s * c) % b
            break
    if not is_prototype(a, b, c, e):
        raise NormalizationFailed(f"({a},{b},{c},{e}) is not a prototype")
    # frame: direction coordinates -> sheared -> scaled normal form
    u = as_fe(b) / mu2
    sig = sigma + s_shift * mu1 / eta1
    d, dd = dec.d, dec.dd
    # (p, q) = (dot(d, h)/dd, wedge(d, h)); x = u (p + sig q), y = u mu1/eta1 q
    ky = u * mu1 / eta1
    frame = ((u * d.x / dd - u * sig * d.y, u * d.y / dd + u * sig * d.x),
             (-ky * d.y, ky * d.x))
    return Prototype(a, b, c, e), sc, bc, frame


def _one_cylinder_labels(dec):
    cyl = dec.cylinders[0]
    mu = cyl.mu
    lens = [dec.mus[s] / mu for s in cyl.bottom]
    rot = min(tuple(str(x) for x in lens[i:] + lens[:i]) for i in range(len(lens)))
    cid = "[" + ",".join(rot) + "]"
    labels = {cyl.key: VertexLabel("OneCyl", None, cid)}
    for g in dec.degenerates:
        part = sorted(str(dec.mus[s] / mu) for s in g.join)
        labels[g.key] = VertexLabel("Degenerate", None, cid + "{" + ",".join(part) + "}")
    return labels


def classify_direction(S: Surface, d, budget: int = DEFAULT_BUDGET) -> DirectionClass:
    """Vertex labels of all cylinders in a periodic direction of S."""
    direction = d if isinstance(d, Direction) else Direction(d)
    dec = cylinder_decomposition(S, direction, budget)
    if not dec.periodic:
        raise NotPeriodic("direction is not periodic within the budget")
    if S.stratum != "H(2)":
        raise NormalizationFailed("classification is for H(2) surfaces")
    if len(dec.cylinders) == 2:
        proto, sc, bc, frame = _two_cylinder_form(dec)
        labels = {sc.key: VertexLabel("TwoCyl", proto, "simple"),
                  bc.key: VertexLabel("TwoCyl", proto, "nonsimple")}
        for g in dec.degenerates:
            labels[g.key] = VertexLabel("Degenerate", proto, "twocyl")
        shear = _stabilizer_shear(proto)
        return DirectionClass(direction, "two", proto, labels, frame, shear)
    if len(dec.cylinders) == 1:
        return DirectionClass(direction, "one", None, _one_cylinder_labels(dec), None, None)
    raise NormalizationFailed(f"{len(dec.cylinders)} cylinders in an H(2) direction")


def _inverse(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    return ((d / det, -b / det), (-c / det, a / det))


def _mul(m, n):
    return tuple(tuple(sum((m[i][k] * n[k][j] for k in range(2)), as_fe(0)) for j in range(2))
                 for i in range(2))


_STAB = {}


def _stabilizer_shear(proto: Prototype) -> Fraction:
    """Smallest shear x -> x + s*y of the prototype surface realised by an
    affine automorphism: the multi-twist value, or a fraction of it when
    the surface has the extra symmetry."""
    if proto in _STAB:
        return _STAB[proto]
    full = Fraction(proto.b, gcd(proto.b, proto.c))
    P = build_prototype_surface(proto)
    best = full
    for k in range(2, 7):
        s = full / k
        m = ((as_fe(1), as_fe(s)), (as_fe(0), as_fe(1)))
        if translation_isomorphic(P, P.transformed(m)):
            best = min(best, s)
    _STAB[proto] = best
    return best


def _apply(m, v: Vec2):
    return (m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)


# --------------------------------------------------------------- quotient


class QuotientGraph(NamedTuple):
    D: int
    vertices: list       # VertexLabel, sorted by str
    edges: dict          # (label_i, label_j) sorted pair of str -> multiplicity
    representatives: dict
    search_r2: FieldElement

    def edge_list(self):
        out = []
        for (u, v), m in sorted(self.edges.items()):
            out.extend([(u, v)] * m)
        return out

    def loops(self):
        return {u: m for (u, v), m in self.edges.items() if u == v}

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "D": self.D,
            "vertices": [str(v) for v in self.vertices],
            "edges": [{"u": u, "v": v, "multiplicity": m} for (u, v), m in sorted(self.edges.items())],
        }

    def to_dot(self) -> str:
        names = {str(v): f"v{i}" for i, v in enumerate(self.vertices)}
        lines = [f'graph "quotient_D{self.D}" {{']
        for v in self.vertices:
            lines.append(f'  {names[str(v)]} [label="{v}"];')
        for u, v in self.edge_list():
            lines.append(f"  {names[u]} -- {names[v]};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def signature(self):
        """Label-free invariant used to compare with the reference graphs."""
        return (len(self.vertices), tuple(sorted(self.edges.items())))


def _reduce(x: FieldElement, y: FieldElement, shear: Fraction):
    """Canonical representative of (x, y) under x -> x + k*shear*y."""
    if y.sign() < 0:
        x, y = -x, -y
    period = y * shear
    return fmod(x, period), y


def quotient_graph(D: int, search_r2=None, budget: int = DEFAULT_BUDGET) -> QuotientGraph:
    """Quotient of the cylinder graph of the prototype surface of
    discriminant D by its affine group."""
    protos = enumerate_prototypes(D)
    if not protos:
        raise BadDiscriminant(f"no prototypes for D={D}")
    S = build_prototype_surface(protos[0])
    strict = search_r2 is not None
    r2 = as_fe(search_r2) if strict else S.area * 16
    classes = {}
    reps = {}
    dir_classes = []
    for dr in saddle_directions(S, r2):
        dc = classify_direction(S, dr, budget)
        dir_classes.append(dc)
        dec = cylinder_decomposition(S, dr, budget)
        for cyl in dec.all_cylinders:
            lab = dc.labels[cyl.key]
            classes.setdefault(str(lab), lab)
            reps.setdefault(str(lab), (cyl, dc))
    missing = [p for p in protos if f"TwoCyl{p}:simple" not in classes]
    if missing:
        raise SearchBudgetTooSmall(f"prototypes {missing} not met within r^2={r2}")
    edges = {}

    def add(u, v, keyset, key):
        pair = tuple(sorted((u, v)))
        keyset.setdefault(pair, set()).add(key)

    keysets = {}
    # parallel edges: one orbit per pair of labels in a direction class
    seen_dir = set()
    for dc in dir_classes:
        sig = (dc.kind, dc.prototype, tuple(sorted(str(l) for l in dc.labels.values())))
        if sig in seen_dir:
            continue
        seen_dir.add(sig)
        dec = cylinder_decomposition(S, dc.direction, budget)
        cyls = dec.all_cylinders
        for i in range(len(cyls)):
            for j in range(i + 1, len(cyls)):
                if intersection_number(S, cyls[i], cyls[j]) == 0:
                    u, v = str(dc.labels[cyls[i].key]), str(dc.labels[cyls[j].key])
                    add(u, v, keysets, ("parallel", sig))
    # transverse edges: from each simple representative, neighbours inside
    # the twist window
    for name, (C, dc) in sorted(reps.items()):
        if classes[name].kind != "TwoCyl" or classes[name].slot != "simple":
            continue
        for E, edc in _window_neighbours(S, C, dc, r2, budget, strict):
            k1 = _pair_invariant(C, dc, E)
            if edc.kind == "two" and edc.labels[E.key].slot == "simple":
                k2 = _pair_invariant(E, edc, C)
                key = ("transverse", frozenset((k1, k2)))
            else:
                key = ("transverse", k1)
            add(name, str(edc.labels[E.key]), keysets, key)
    for pair, ks in keysets.items():
        edges[pair] = len(ks)
    vertices = sorted(classes.values(), key=str)
    return QuotientGraph(D, vertices, edges, {k: v[0] for k, v in reps.items()}, r2)


def _pair_invariant(C: Cylinder, dc: DirectionClass, E: Cylinder):
    x, y = _apply(dc.frame, E.holonomy)
    x, y = _reduce(x, y, dc.shear)
    return (str(dc.labels[C.key]), x, y)


def _window_neighbours(S, C, dc, r2, budget, strict):
    """Cylinders disjoint from the simple cylinder C, one per orbit of the
    stabiliser of C, not parallel to C."""
    frame, shear = dc.frame, dc.shear
    xc, _ = _apply(frame, C.holonomy)
    det = frame[0][0] * frame[1][1] - frame[0][1] * frame[1][0]
    # a core disjoint from C stays in the complementary slit torus, which
    # bounds |hol(E) ^ hol(C)| by the area of that torus
    ymax = det * (S.area - C.area) / abs(xc)
    inv = _inverse(frame)
    e1 = Vec2(inv[0][0], inv[1][0])
    e2 = Vec2(inv[0][1], inv[1][1])
    xmax = ymax * shear
    bound = 2 * (xmax * xmax * dot(e1, e1) + ymax * ymax * dot(e2, e2))
    if bound > r2 and strict:
        raise SearchBudgetTooSmall(f"twist window needs r^2 >= {float(bound):.4g}, have {float(r2):.4g}")
    # every cylinder holonomy is a positive multiple of a saddle connection
    # in its direction, so the slope x/y must lie in [0, shear) and the
    # shortest saddle connection must have y <= ymax
    best = {}
    for sc in enumerate_saddle_connections(S, bound):
        dr = Direction(sc.holonomy)
        if dr == C.direction:
            continue
        x, y = _apply(frame, sc.holonomy)
        if not y:
            continue
        if y.sign() < 0:
            x, y = -x, -y
        if x.sign() < 0 or x >= y * shear or y > ymax:
            continue
        best[dr] = dr
    out = []
    for dr in sorted(best, key=lambda d: d.sort_key()):
        dec = cylinder_decomposition(S, dr, budget)
        if not dec.periodic:
            continue
        edc = None
        for E in dec.all_cylinders:
            x, y = _apply(frame, E.holonomy)
            if y.sign() < 0:
                x, y = -x, -y
            if y > ymax or x.sign() < 0 or x >= y * shear:
                continue
            if not disjoint(S, C, E):
                continue
            if edc is None:
                edc = classify_direction(S, dr, budget)
            out.append((E, edc))
    return out


# reference multigraphs: label pairs with multiplicities
def _t(p, slot):
    return f"TwoCyl{Prototype(*p)}:{slot}"


GOLDEN_EDGES = {
    5: {
        tuple(sorted((_t((0, 1, 1, -1), "nonsimple"), _t((0, 1, 1, -1), "simple")))): 1,
        (_t((0, 1, 1, -1), "simple"), _t((0, 1, 1, -1), "simple")): 1,
    },
    8: {
        tuple(sorted((_t((0, 2, 1, 0), "nonsimple"), _t((0, 2, 1, 0), "simple")))): 1,
        tuple(sorted((_t((0, 2, 1, 0), "simple"), _t((0, 1, 1, -2), "simple")))): 1,
        tuple(sorted((_t((0, 1, 1, -2), "simple"), _t((0, 1, 1, -2), "nonsimple")))): 1,
        (_t((0, 1, 1, -2), "simple"), _t((0, 1, 1, -2), "simple")): 1,
    },
    9: {
        tuple(sorted((_t((0, 2, 1, -1), "nonsimple"), _t((0, 2, 1, -1), "simple")))): 1,
        ("DEGENERATE", _t((0, 2, 1, -1), "simple")): 1,
        ("DEGENERATE", "ONECYL"): 1,
        (_t((0, 2, 1, -1), "simple"), _t((0, 2, 1, -1), "simple")): 1,
    },
}


def matches_golden(G: QuotientGraph) -> bool:
    """Compare with the reference multigraph, matching the one-cylinder and
    degenerate classes by kind."""
    ref = GOLDEN_EDGES.get(G.D)
    if ref is None:
        raise PreconditionFailed(f"no reference graph for D={G.D}")
    rename = {}
    for v in G.vertices:
        if v.kind == "OneCyl":
            rename[str(v)] = "ONECYL"
        elif v.kind == "Degenerate":
            rename[str(v)] = "DEGENERATE"
    got = {}
    for (u, v), m in G.edges.items():
        key = tuple(sorted((rename.get(u, u), rename.get(v, v))))
        got[key] = got.get(key, 0) + m
    ref = {tuple(sorted(k)): m for k, m in ref.items()}
    names = {x for k in ref for x in k}
    got_names = {rename.get(str(v), str(v)) for v in G.vertices}
    return got == ref and names == got_names and len(G.vertices) == len(names)


# ------------------------------------------------------ six-square surface


class EdgeExperimentRow(NamedTuple):
    n: int
    direction: tuple
    iota_with_c2: int
    disjoint_from_c1: bool
    affine: bool

    def to_json(self) -> dict:
        return {"n": self.n, "direction": list(self.direction), "iota": self.iota_with_c2,
                "disjointFromC1": self.disjoint_from_c1, "affine": self.affine}


def six_square_edge_experiment(N: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Images E_n of the two-square horizontal cylinder C2 under powers of
    the vertical parabolic with derivative (1 0; 2 1), n = 0..N."""
    S = six_square_surface()
    hdec = cylinder_decomposition(S, Vec2(1, 0), budget)
    by_mu = {c.mu * c.d.x: c for c in hdec.cylinders}
    C1, C2 = by_mu[1], by_mu[2]
    rows = []
    for n in range(N + 1):
        P = ((as_fe(1), as_fe(0)), (as_fe(2 * n), as_fe(1)))
        affine = n == 0 or translation_isomorphic(S, S.transformed(P))
        h = Vec2(2, 4 * n)
        dec = cylinder_decomposition(S, h, budget)
        matches = [c for c in dec.cylinders if c.holonomy == h or c.holonomy == -h]
        matches = [c for c in matches if c.area == C2.area]
        if len(matches) != 1:
            raise PreconditionFailed(f"image of C2 not identified for n={n}")
        E = matches[0]
        rows.append(EdgeExperimentRow(n, (1, 2 * n), intersection_number(S, E, C2),
                                      disjoint(S, E, C1), affine))
    ok = all(r.iota_with_c2 == 2 * r.n and r.disjoint_from_c1 and r.affine for r in rows)
    distinct = len({r.iota_with_c2 for r in rows}) == len(rows)
    return {"schema": SCHEMA, "rows": [r.to_json() for r in rows], "ok": ok and distinct}
