"""Cylinders avoiding the slit of a slit torus."""

from fractions import Fraction as F

from flatcyl.errors import NoRoom
from flatcyl.flow import bounded_circumference_cylinder, slit_disjoint_cylinder
from flatcyl.surface import build_slit_torus

alpha, t = F(2, 5), F(1, 2)
T = build_slit_torus(((1, 0), (0, 1)), (1, alpha), t)
print(f"unit square torus, slit {t}*(1, {alpha})")
for pq in ((1, 0), (0, 1), (1, 1), (2, 1), (5, 2), (3, -1)):
    try:
        split = slit_disjoint_cylinder(T, pq)
        print(f"  direction {pq}: slit cylinder area {split.containing_area}, free cylinder area {split.disjoint.area}")
    except NoRoom as exc:
        print(f"  direction {pq}: no room ({exc})")

U = build_slit_torus(((F(3, 2), F(1, 4)), (F(-1, 2), F(7, 12))), (F(6, 5), F(3, 5)))
C = bounded_circumference_cylinder(U, 2)
print(f"\nsheared torus: cylinder of area {C.area} and circumference^2 {C.circumference2}")
