"""Triangles in the cylinder graph: none on the H(2) prototypes, one on
every H(1,1) square-tiled surface tried."""

from flatcyl import build_ball, build_prototype_surface, enumerate_prototypes, find_triangle
from flatcyl.surface import build_square_tiled, one_cylinder_origami, six_square_surface

surfaces = [(f"prototype {p}", build_prototype_surface(p))
            for D in (5, 8, 9, 12, 13) for p in enumerate_prototypes(D)[:1]]
surfaces += [("six squares", six_square_surface()),
             ("one-cylinder, 4 squares", one_cylinder_origami(4)),
             ("five squares", build_square_tiled("(1,2)(3,4,5)", "(1,3)(2)(4)(5)", mode="genus2"))]

for name, S in surfaces:
    row = []
    for r2 in (4, 9, 16):
        ball = build_ball(S, r2)
        row.append(f"r2={r2}: {ball.n:3d} cyl, triangle={'yes' if find_triangle(ball) else 'no '}")
    print(f"{name:26s} {S.stratum:7s} " + " | ".join(row))
