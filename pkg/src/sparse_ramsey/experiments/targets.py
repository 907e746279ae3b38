"""Random members of bounded-degree, bounded-degeneracy graph classes."""

from __future__ import annotations

import networkx as nx
import numpy as np

from ..graph import Graph, OrderedGraph, complete_graph, degeneracy_order, disjoint_union, path_graph


class InfeasibleParameters(ValueError):
    pass


def generate_target(D: int, Delta: int, n: int, seed: int) -> OrderedGraph:
    """Sequential insertion: vertex ``v`` joins up to ``D`` earlier vertices
    that still have spare degree.  The returned order is the insertion order,
    so every vertex has at most ``D`` left neighbours."""
    if D < 0 or Delta < 0 or n < 0:
        raise InfeasibleParameters("parameters must be non-negative")
    if D > Delta:
        raise InfeasibleParameters(f"D={D} exceeds Delta={Delta}")
    rng = np.random.default_rng(seed)
    deg = np.zeros(n, dtype=np.int64)
    edges = []
    for v in range(1, n):
        spare = np.flatnonzero(deg[:v] < Delta)
        k = min(len(spare), int(rng.integers(1, D + 1)) if D else 0, Delta)
        for u in rng.choice(spare, size=k, replace=False).tolist() if k else ():
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    g = Graph(n, edges)
    og = OrderedGraph(g, tuple(range(n)))
    if not og.is_degenerate(D) or g.max_degree > Delta:
        raise AssertionError("generator produced a graph outside the class")
    return og


def maxdegree_target(regular_n: int = 20, path_n: int = 10, seed: int = 0, *, k4: bool = True,
                     Delta: int = 3) -> Graph:
    """``K4`` (optional), a random ``Delta``-regular graph and a path, disjointly."""
    parts = []
    if k4:
        parts.append(complete_graph(4))
    if regular_n:
        if regular_n * Delta % 2 or regular_n <= Delta:
            raise InfeasibleParameters(f"no {Delta}-regular graph on {regular_n} vertices")
        reg = nx.random_regular_graph(Delta, regular_n, seed=seed)
        parts.append(Graph(regular_n, reg.edges()))
    if path_n:
        parts.append(path_graph(path_n))
    return disjoint_union(*parts)[0]


def in_class(g: Graph, D: int, Delta: int) -> bool:
    return g.max_degree <= Delta and degeneracy_order(g)[1] <= D
