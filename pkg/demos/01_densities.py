"""
Densities of small patterns
===========================

Maximum 2-density, rooted (Spencer) density and root growth on a few
familiar graphs.  Everything here is exact rational arithmetic.
"""

from fractions import Fraction

from sparse_ramsey.density import (
    RootedPattern, d2, duplicate_along, findroots_trace, m2, spencer_density,
)
from sparse_ramsey.experiments import generate_target
from sparse_ramsey.graph import Graph, complete_graph, cycle_graph, path_graph

# d2(H) = (e - 1) / (v - 2); m2 maximises it over subgraphs on at least 3 vertices
for name, g in [("K4", complete_graph(4)), ("C5", cycle_graph(5)), ("P6", path_graph(6))]:
    rep = m2(g)
    print(f"{name}: d2 = {d2(g)}, m2 = {rep.value} on {rep.witness}")

# K4 with a pendant path: the clique still dominates
tail = Graph(7, list(complete_graph(4).edges()) + [(3, 4), (4, 5), (5, 6)])
print("K4 + tail:", m2(tail).value)

# rooted density: the worst ratio e(X) / |X| over nonempty free sets X,
# counting edges inside X and from X to the roots
rp = RootedPattern(cycle_graph(6), frozenset({0, 3}))
rep = spencer_density(rp)
print("C6 rooted at {0, 3}:", rep.value, "witness", rep.witness)

# root growth in a 2-degenerate graph: roots are added until every free set is sparse
og = generate_target(2, 4, 9, seed=1)
print("target edges:", sorted(og.graph.edges()))
tr = findroots_trace(og, [], [0, 5], 2, Fraction(1, 8))
print("roots grown from {0, 5}:", sorted(tr.roots), "added sets", tr.witnesses, "size bound", tr.bound)

# duplicating a segment of a cycle keeps m2 in check
h = duplicate_along(cycle_graph(8), [2, 3, 4])
print("C8 with a doubled 3-path:", h.n, "vertices, m2 =", m2(h).value)
