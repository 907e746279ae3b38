"""
Random hosts and their regularity
=================================

Sample a sparse random graph, check two typicality properties, count rooted
extensions, then colour the edges and decompose the colour classes.
"""

import numpy as np

from sparse_ramsey.density import RootedPattern
from sparse_ramsey.ensemble import (
    EnsembleSpec, check_neighbourhood_property, check_upper_regular, concentration_experiment, sample_gnp,
)
from sparse_ramsey.experiments import colour_edges
from sparse_ramsey.graph import path_graph
from sparse_ramsey.regularity import select_colour_and_parts, strengthened_srl

spec = EnsembleSpec(1500, 0.2, seed=7)
G = sample_gnp(spec)
print(G, "mean degree", 2 * G.m / G.n)

# common neighbourhoods of D-sets have size close to p^D N; at this size all
# 1.1 million pairs are checked and a window of +-50% around 60 is about four
# standard deviations, so on the order of a hundred genuine outliers is expected
v = check_neighbourhood_property(G, 2, 0.5, spec.p)
print(f"neighbourhoods: {len(v.violations)} of {v.tested} sets outside the window ({v.mode})")
print("upper regular:", check_upper_regular(G, 0.3, spec.p, samples=200).holds)

# extensions of a rooted path: one root, three free vertices
rp = RootedPattern(path_graph(4), frozenset({0}))
rep = concentration_experiment(rp, spec, 0.25, 50, host=G)
print(f"extensions: expected {rep.expected:.0f}, ratio range {rep.min_ratio:.2f}..{rep.max_ratio:.2f}, "
      f"{rep.fraction:.0%} within 25%")

# two colours, then a coarse/fine decomposition of both colour classes at once
c = colour_edges(G, "random", 2, seed=1)
graphs = c.class_graphs
dec = strengthened_srl(graphs, 0.3, lambda k: 0.3, 5, spec.p, fine_split=2, seed=0)
print("coarse parts", len(dec.coarse), "fine parts", len(dec.fine))
print("energy trace", [f"{float(e):.4f}" for e in dec.energy_trace])

# a colour whose dense pairs span a clique of coarse parts
sel = select_colour_and_parts(dec, graphs, 2, 4)
print("colour", sel.colour, "parts", sel.coarse_indices, "part size", sel.part_size)
print("densities", {k: round(float(v), 2) for k, v in sel.coarse_density.items()})
