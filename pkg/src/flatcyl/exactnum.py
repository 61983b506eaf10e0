"""Exact arithmetic in Q and real quadratic fields Q(sqrt D).

Every geometric predicate in the package reduces to the sign of a
:class:`FieldElement`, which is decided with integer arithmetic only.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

__all__ = [
    "FieldElement",
    "IncompatibleFields",
    "Vec2",
    "Direction",
    "fe",
    "as_fe",
    "wedge",
    "dot",
    "sqrt_field",
]


class IncompatibleFields(ValueError):
    """Raised when two elements live in different quadratic fields."""


@lru_cache(maxsize=None)
def _squarefree(d: int) -> tuple[int, int]:
    """Return (f, k) with d = f*f*k and k squarefree."""
    if d < 0:
        raise ValueError("discriminant must be non-negative")
    if d == 0:
        return 0, 0
    f, k, p = 1, d, 2
    while p * p <= k:
        while k % (p * p) == 0:
            k //= p * p
            f *= p
        p += 1 if p == 2 else 2
    return f, k


class FieldElement:
    """The real number (a + b*sqrt(disc)) / den, kept in canonical form.

    ``disc`` is stored squarefree; a perfect square folds into ``a`` and
    leaves a rational element with ``disc == 0``.
    """

    __slots__ = ("a", "b", "den", "disc")

    def __init__(self, a=0, b=0, den=1, disc=0):
        a, b, den, disc = int(a), int(b), int(den), int(disc)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if b and disc:
            f, k = _squarefree(disc)
            b *= f
            disc = k
            if k == 1:
                a, b, disc = a + b, 0, 0
        else:
            b, disc = 0, 0
        _set(self, a, b, den, disc)

    # construction helpers -------------------------------------------------

    @classmethod
    def _raw(cls, a, b, den, disc):
        obj = object.__new__(cls)
        _set(obj, a, b, den, disc)
        return obj

    @classmethod
    def from_fraction(cls, q) -> "FieldElement":
        q = Fraction(q)
        return cls._raw(q.numerator, 0, q.denominator, 0)

    @classmethod
    def sqrt(cls, d: int) -> "FieldElement":
        """sqrt(d) as an element (rational when d is a square)."""
        return cls(0, 1, 1, d)

    # queries ----------------------------------------------------------------

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.a, self.den)

    def conjugate(self) -> "FieldElement":
        return FieldElement._raw(self.a, -self.b, self.den, self.disc)

    def norm(self) -> Fraction:
        return Fraction(self.a * self.a - self.b * self.b * self.disc, self.den * self.den)

    def rational_part(self) -> Fraction:
        return Fraction(self.a, self.den)

    def sqrt_coefficient(self) -> Fraction:
        return Fraction(self.b, self.den)

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a >= 0 and b > 0:
            return 1
        if a <= 0 and b < 0:
            return -1
        diff = a * a - b * b * self.disc
        s = (diff > 0) - (diff < 0)
        return s if a > 0 else -s

    def __float__(self) -> float:
        if self.b == 0:
            return self.a / self.den
        m = self.b * self.b * self.disc
        # only for display and heuristics; exact predicates never use this
        root = m ** 0.5 if m < 2**1000 else float(isqrt(m))
        return (self.a + (root if self.b > 0 else -root)) / self.den

    def floor(self) -> int:
        if self.b == 0:
            return self.a // self.den
        m = self.b * self.b * self.disc
        r = isqrt(m)
        n = (self.a + (r if self.b > 0 else -r)) // self.den
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # arithmetic ---------------------------------------------------------------

    def __neg__(self):
        return FieldElement._raw(-self.a, -self.b, self.den, self.disc)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        d = _join(self.disc, o.disc)
        den = self.den * o.den
        return _norm(self.a * o.den + o.a * self.den, self.b * o.den + o.b * self.den, den, d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        d = _join(self.disc, o.disc)
        den = self.den * o.den
        return _norm(self.a * o.den - o.a * self.den, self.b * o.den - o.b * self.den, den, d)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        d = _join(self.disc, o.disc)
        a1, b1, a2, b2 = self.a, self.b, o.a, o.b
        return _norm(a1 * a2 + b1 * b2 * d, a1 * b2 + a2 * b1, self.den * o.den, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if o.a == 0 and o.b == 0:
            raise ZeroDivisionError("division by zero field element")
        d = _join(self.disc, o.disc)
        a1, b1, a2, b2 = self.a, self.b, o.a, -o.b
        n = o.a * o.a - o.b * o.b * d
        num_a = (a1 * a2 + b1 * b2 * d) * o.den
        num_b = (a1 * b2 + a2 * b1) * o.den
        den = self.den * n
        if den < 0:
            num_a, num_b, den = -num_a, -num_b, -den
        return _norm(num_a, num_b, den, d)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return FieldElement._raw(1, 0, 1, 0) / (self ** (-n))
        result = FieldElement._raw(1, 0, 1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison -----------------------------------------------------------------

    def _cmp(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return None
        return (self - o).sign()

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.den == o.den and (self.b == 0 or self.disc == o.disc)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.den)) if self.den != 1 else hash(self.a)
        return hash((self.a, self.b, self.den, self.disc))

    # formatting -------------------------------------------------------------

    def __repr__(self):
        return f"FieldElement({self.a}, {self.b}, {self.den}, {self.disc})"

    def __str__(self):
        if self.b == 0:
            return str(self.a) if self.den == 1 else f"{self.a}/{self.den}"
        return f"({self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}√{self.disc})/{self.den}"

    def label(self) -> str:
        """Lossless "(a+b√D)/den" form used in DOT and reports."""
        return f"({self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}√{self.disc})/{self.den}"

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "den": self.den, "disc": self.disc}

    @classmethod
    def from_json(cls, obj) -> "FieldElement":
        if isinstance(obj, (int, str)):
            return cls.from_fraction(Fraction(obj))
        return cls(obj["a"], obj.get("b", 0), obj.get("den", 1), obj.get("disc", 0))


def _set(obj, a, b, den, disc):
    if den < 0:
        a, b, den = -a, -b, -den
    g = gcd(a, b, den)
    if g > 1:
        a //= g
        b //= g
        den //= g
    obj.a = a
    obj.b = b
    obj.den = den
    obj.disc = disc if b else 0


def _norm(a, b, den, disc):
    obj = object.__new__(FieldElement)
    _set(obj, a, b, den, disc)
    return obj


def _join(d1: int, d2: int) -> int:
    if d1 == d2 or d2 == 0:
        return d1
    if d1 == 0:
        return d2
    raise IncompatibleFields(f"Q(√{d1}) and Q(√{d2}) cannot be mixed")


def _coerce(x):
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, int):
        return FieldElement._raw(x, 0, 1, 0)
    if isinstance(x, Fraction):
        return FieldElement._raw(x.numerator, 0, x.denominator, 0)
    return NotImplemented


def as_fe(x) -> FieldElement:
    """Coerce an int, Fraction, decimal string or FieldElement."""
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, str):
        x = Fraction(x)
    c = _coerce(x)
    if c is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to FieldElement")
    return c


fe = as_fe


def sqrt_field(d: int) -> FieldElement:
    return FieldElement.sqrt(d)


ZERO = FieldElement._raw(0, 0, 1, 0)
ONE = FieldElement._raw(1, 0, 1, 0)


class Vec2:
    """Immutable plane vector with :class:`FieldElement` coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        object.__setattr__(self, "x", as_fe(x))
        object.__setattr__(self, "y", as_fe(y))

    @classmethod
    def _raw(cls, x, y):
        v = object.__new__(cls)
        v.x = x
        v.y = y
        return v

    def __add__(self, o):
        return Vec2._raw(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return Vec2._raw(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return Vec2._raw(-self.x, -self.y)

    def __mul__(self, k):
        return Vec2._raw(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Vec2._raw(self.x / k, self.y / k)

    def __eq__(self, o):
        if not isinstance(o, Vec2):
            return NotImplemented
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self):
        return f"Vec2({self.x}, {self.y})"

    def is_zero(self) -> bool:
        return not self.x and not self.y

    def norm2(self) -> FieldElement:
        return self.x * self.x + self.y * self.y

    def perp(self) -> "Vec2":
        """Rotation by +90 degrees."""
        return Vec2._raw(-self.y, self.x)

    def apply(self, m) -> "Vec2":
        """Apply the 2x2 matrix ``((m00, m01), (m10, m11))``."""
        (a, b), (c, d) = m
        return Vec2._raw(a * self.x + b * self.y, c * self.x + d * self.y)

    def to_float(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def to_json(self) -> list:
        return [self.x.to_json(), self.y.to_json()]

    @classmethod
    def from_json(cls, obj) -> "Vec2":
        return cls(FieldElement.from_json(obj[0]), FieldElement.from_json(obj[1]))


def wedge(u: Vec2, v: Vec2) -> FieldElement:
    return u.x * v.y - u.y * v.x


def dot(u: Vec2, v: Vec2) -> FieldElement:
    return u.x * v.x + u.y * v.y


class Direction:
    """An unoriented direction: a line through the origin.

    The stored representative is ``(x/y, 1)`` when ``y != 0`` and ``(1, 0)``
    otherwise, which is idempotent and independent of scale or sign.
    ``vector`` keeps a friendlier representative for display.
    """

    __slots__ = ("key", "vector")

    def __init__(self, v: Vec2):
        if v.is_zero():
            raise ValueError("zero vector has no direction")
        if v.y.sign() < 0 or (not v.y and v.x.sign() < 0):
            v = -v
        key = (ONE, ZERO) if not v.y else (v.x / v.y, ONE)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "vector", _primitive(v))

    @property
    def v(self) -> Vec2:
        return self.vector

    def __eq__(self, o):
        return isinstance(o, Direction) and self.key == o.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Direction({self.vector.x}, {self.vector.y})"

    def parallel(self, u: Vec2) -> bool:
        return not wedge(self.vector, u)

    def sort_key(self):
        """Order by angle in [0, pi)."""
        x, y = self.key
        return (0, ZERO) if not y else (1, -x)


def _primitive(v: Vec2) -> Vec2:
    """Scale a rational vector to coprime integers; leave others alone."""
    if v.x.b or v.y.b:
        return v
    fx, fy = v.x.to_fraction(), v.y.to_fraction()
    den = fx.denominator * fy.denominator // gcd(fx.denominator, fy.denominator)
    ix, iy = int(fx * den), int(fy * den)
    g = gcd(ix, iy)
    return Vec2(ix // g, iy // g)
