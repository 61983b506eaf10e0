"""A walk around the golden L: cylinders, saddle connections, a ball of the
cylinder graph and a certified path between two cylinders."""

from flatcyl import build_ball, build_prototype_surface, connect_path, cylinder_decomposition, find_triangle
from flatcyl.exactnum import Vec2
from flatcyl.flow import enumerate_saddle_connections
from flatcyl.topology import intersection_number

L = build_prototype_surface((0, 1, 1, -1))
print(L, "cone angles (units of pi):", [L.cone_angle_pi(c) for c in L.singular])

for name, d in (("horizontal", Vec2(1, 0)), ("vertical", Vec2(0, 1))):
    dec = cylinder_decomposition(L, d)
    print(f"\n{name} cylinders")
    for c in dec.cylinders:
        print(f"  circumference^2={c.circumference2}  area={c.area}  simple={c.simple}")

sc = enumerate_saddle_connections(L, 2)
print(f"\n{len(sc)} saddle connections with |hol|^2 <= 2")
for s in sc[:5]:
    print("  ", s)

ball = build_ball(L, 4)
print(f"\nball at r^2=4: {ball.n} cylinders, {len(ball.edges())} disjoint pairs, "
      f"triangle: {find_triangle(ball)}")

H = cylinder_decomposition(L, Vec2(1, 0)).cylinders[0]
far = max(ball.vertices, key=lambda c: intersection_number(L, H, c))
res = connect_path(L, H, far)
print(f"\npath from {H} to {far}")
print(f"  iota={res.iota}  length={res.length}  bound={res.bound}  certified={res.ok}")
