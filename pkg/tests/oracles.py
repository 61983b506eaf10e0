"""Independent reference computations for square-tiled surfaces.

Nothing here uses the package's geometry: squares are walked directly
through the permutations.
"""

from math import gcd


def parse_cycles(text, n):
    img = list(range(n))
    for part in text.replace(" ", "").split(")"):
        part = part.strip("(")
        if part:
            cyc = [int(x) - 1 for x in part.split(",")]
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
    return img


class Origami:
    # corners: 0 lower-left, 1 lower-right, 2 upper-right, 3 upper-left
    def __init__(self, h, v, n):
        self.n = n
        self.r = parse_cycles(h, n)
        self.u = parse_cycles(v, n)
        self.ri = [self.r.index(i) for i in range(n)]
        self.ui = [self.u.index(i) for i in range(n)]
        parent = list(range(4 * n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for s in range(n):
            union(4 * s + 1, 4 * self.r[s] + 0)
            union(4 * s + 2, 4 * self.r[s] + 3)
            union(4 * s + 3, 4 * self.u[s] + 0)
            union(4 * s + 2, 4 * self.u[s] + 1)
        size = {}
        for x in range(4 * n):
            size[find(x)] = size.get(find(x), 0) + 1
        self._singular = {x: size[find(x)] > 4 for x in range(4 * n)}
        self.cone_angles_pi = sorted(k // 2 for k in size.values() if k > 4)

    def singular(self, s, corner):
        return self._singular[4 * s + corner]

    def _walk(self, s, a, b, r2):
        """Oriented saddle connections leaving corner of square s in
        direction (a, b), a > 0 (b may be negative), or along an axis."""
        step = a * a + b * b
        k = 0
        while True:
            k += 1
            if k * k * step > r2:
                return None
            if b == 0:
                s = self.r[s]
                if self.singular(s, 0):
                    return k
                continue
            if a == 0:
                s = self.u[s]
                if self.singular(s, 0):
                    return k
                continue
            up = b > 0
            events = sorted([(i / a, "v") for i in range(1, a)] + [(j / abs(b), "h") for j in range(1, abs(b))])
            for _, kind in events:
                s = self.r[s] if kind == "v" else (self.u[s] if up else self.ui[s])
            end = 2 if up else 1
            if self.singular(s, end):
                return k
            s = self.u[self.r[s]] if up else self.ui[self.r[s]]

    def saddle_count(self, r2):
        """Number of unoriented saddle connections with |hol|^2 <= r2."""
        total = 0
        R = int(r2 ** 0.5) + 1
        for a in range(0, R + 1):
            for b in range(-R, R + 1):
                if gcd(a, b) != 1 or (a == 0 and b != 1):
                    continue
                start = 0 if b >= 0 else 3
                for s in range(self.n):
                    if self.singular(s, start) and self._walk(s, a, b, r2):
                        total += 1
        return total
