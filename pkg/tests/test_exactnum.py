from decimal import Decimal, getcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from flatcyl.exactnum import Direction, FieldElement, IncompatibleFields, Vec2, as_fe, dot, wedge

getcontext().prec = 80


def approx(x: FieldElement) -> Decimal:
    return (Decimal(x.a) + Decimal(x.b) * Decimal(x.disc).sqrt()) / Decimal(x.den)


small = st.integers(-50, 50)
discs = st.sampled_from([2, 3, 5, 13, 17])


@st.composite
def elements(draw, disc=None):
    d = draw(discs) if disc is None else disc
    return FieldElement(draw(small), draw(small), draw(st.integers(1, 30)), d)


def test_squarefree_normalisation():
    assert FieldElement(0, 1, 1, 8) == FieldElement(0, 2, 1, 2)
    assert FieldElement(0, 1, 1, 9) == 3
    assert FieldElement(2, 2, 4, 5).to_json() == {"a": 1, "b": 1, "den": 2, "disc": 5}


def test_golden_ratio():
    g = FieldElement(1, 1, 2, 5)
    assert g * g - g - 1 == 0
    assert 1 / g == g - 1
    assert g.floor() == 1
    assert g.norm() == -1
    assert str(g.conjugate()) == "(1-1√5)/2"


def test_label_is_lossless():
    assert FieldElement(3, -1, 2, 5).label() == "(3-1√5)/2"
    assert as_fe(4).label() == "(4+0√0)/1"


def test_incompatible_fields():
    with pytest.raises(IncompatibleFields):
        FieldElement(0, 1, 1, 5) + FieldElement(0, 1, 1, 2)


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        FieldElement(1, 0, 0)
    with pytest.raises(ZeroDivisionError):
        as_fe(1) / FieldElement(0)


def test_json_accepts_unnormalised():
    x = FieldElement.from_json({"a": 4, "b": 2, "den": -4, "disc": 20})
    assert x == FieldElement(-1, -1, 1, 5)
    assert FieldElement.from_json("3/7") == F(3, 7)


def test_direction_is_unoriented():
    assert Direction(Vec2(2, 4)) == Direction(Vec2(-1, -2))
    assert Direction(Vec2(2, 4)).vector == Vec2(1, 2)
    assert Direction(Vec2(-3, 0)).vector == Vec2(1, 0)
    with pytest.raises(ValueError):
        Direction(Vec2(0, 0))


def test_wedge_dot():
    u, v = Vec2(1, 2), Vec2(3, F(1, 2))
    assert wedge(u, v) == F(1, 2) - 6
    assert dot(u, v) == 4


@given(discs.flatmap(lambda d: st.tuples(elements(d), elements(d))))
def test_sign_and_order_match_decimal(pair):
    x, y = pair
    dx, dy = approx(x), approx(y)
    assert x.sign() == (dx > 0) - (dx < 0)
    assert (x < y) == (dx < dy)
    assert x.floor() == int(dx.to_integral_value(rounding="ROUND_FLOOR"))


@given(discs.flatmap(lambda d: st.tuples(elements(d), elements(d), elements(d))))
def test_field_axioms(triple):
    x, y, z = triple
    assert (x + y) * z == x * z + y * z
    assert x - x == 0
    if x:
        assert x * (1 / x) == 1
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


@given(elements())
def test_json_round_trip(x):
    assert FieldElement.from_json(x.to_json()) == x
