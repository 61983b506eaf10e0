"""Quotient graphs of the small discriminants, printed as DOT, plus the
six-square family of pairwise inequivalent disjoint pairs."""

import time

from flatcyl import quotient_graph
from flatcyl.quotient import matches_golden, six_square_edge_experiment

for D in (5, 8, 9):
    t = time.perf_counter()
    G = quotient_graph(D)
    print(f"// D={D}: {len(G.vertices)} vertices, {len(G.edge_list())} edges, "
          f"matches reference: {matches_golden(G)}, {time.perf_counter() - t:.1f}s")
    print(G.to_dot())

print("six-square surface: E_n = image of C1 under the n-th power of the vertical twist")
for row in six_square_edge_experiment(5)["rows"]:
    print(f"  n={row['n']}  direction={row['direction']}  iota(E_n, C2)={row['iota']}  "
          f"disjoint from C1={row['disjointFromC1']}")
