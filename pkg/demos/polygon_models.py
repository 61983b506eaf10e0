"""Cut a sheared golden L along an invariant triangulation and read off its
centrally symmetric polygon; then rebuild the surface from the polygon."""

from fractions import Fraction

from flatcyl import build_prototype_surface, canonical_polygon_form, cylinder_decomposition
from flatcyl.exactnum import Vec2
from flatcyl.polygon import polygon_model_from_vertices, rebuild_matches

S = build_prototype_surface((0, 1, 1, -1)).transformed(((1, Fraction(1, 3)), (0, 1)))
C = next(c for c in cylinder_decomposition(S, Vec2(1, 0)).cylinders if c.simple)
m = canonical_polygon_form(S, C)
print(f"{m.kind} from the simple horizontal cylinder, configuration {m.triangulation.configuration}")
for name, pts in (("P", m.P), ("Q", m.Q)):
    print(f"  {name}: " + "  ".join(f"({v.x}, {v.y})" for v in pts))
print("  checks:", m.checks())
print("  rebuilt surface is the original:", rebuild_matches(S, m))

decagon = polygon_model_from_vertices([(1, 2), (3, 7), (5, 6), (8, 7), (9, 2)],
                                      [(8, 0), (6, -5), (4, -4), (1, -5), (0, 0)])
print(f"\na decagon of model {decagon.model}, glued surface in {decagon.to_surface().stratum}")
