"""Equitable partitions of ``F`` into classes of pairwise far-apart vertices."""

from __future__ import annotations

import logging

import networkx as nx

from ..graph import Graph, bfs_distances, power_graph
from ..regularity.partition import Partition

log = logging.getLogger(__name__)


class RebalancingBudgetExceeded(RuntimeError):
    pass


def _greedy(P: Graph, h: int) -> list[int]:
    """Highest conflict-degree first; each vertex joins the smallest class
    it has no conflict with (lowest index on ties)."""
    colour = [-1] * P.n
    size = [0] * h
    for v in sorted(range(P.n), key=lambda u: (-len(P.adj[u]), u)):
        banned = {colour[u] for u in P.adj[v]}
        options = [c for c in range(h) if c not in banned]
        if not options:
            raise RebalancingBudgetExceeded(f"vertex {v} conflicts with all {h} classes")
        c = min(options, key=lambda c: (size[c], c))
        colour[v] = c
        size[c] += 1
    return colour


def _repair(P: Graph, colour: list[int], h: int, budget: int) -> bool:
    """Move or swap vertices until class sizes differ by at most one."""
    classes = [set() for _ in range(h)]
    for v, c in enumerate(colour):
        classes[c].add(v)

    def free_for(v, c):
        return all(colour[u] != c for u in P.adj[v])

    for _ in range(budget):
        big = max(range(h), key=lambda c: (len(classes[c]), -c))
        small = min(range(h), key=lambda c: (len(classes[c]), c))
        if len(classes[big]) - len(classes[small]) <= 1:
            return True
        # direct move from any over-full class into the smallest
        moved = False
        for b in sorted(range(h), key=lambda c: -len(classes[c])):
            if len(classes[b]) - len(classes[small]) <= 1:
                break
            v = next((v for v in sorted(classes[b]) if free_for(v, small)), None)
            if v is not None:
                classes[b].remove(v)
                classes[small].add(v)
                colour[v] = small
                moved = True
                break
        if moved:
            continue
        # two-step: big -> mid and mid -> small
        for mid in range(h):
            if mid in (big, small):
                continue
            for v in sorted(classes[big]):
                if not free_for(v, mid):
                    continue
                w = next((w for w in sorted(classes[mid])
                          if w not in P.adj[v] and free_for(w, small)), None)
                if w is not None:
                    classes[big].remove(v)
                    classes[mid].add(v)
                    colour[v] = mid
                    classes[mid].remove(w)
                    classes[small].add(w)
                    colour[w] = small
                    moved = True
                    break
            if moved:
                break
        if not moved:
            return False
    return False


def verify_distance_partition(F: Graph, classes, ell: int) -> list[str]:
    """Independent check: equitable, a partition of V(F), and every two
    vertices of a class are more than ``ell`` apart.  Returns the problems."""
    problems = []
    seen = [v for c in classes for v in c]
    if sorted(seen) != list(range(F.n)):
        problems.append("classes do not partition V(F)")
    sizes = [len(c) for c in classes]
    if sizes and max(sizes) - min(sizes) > 1:
        problems.append(f"class sizes {sizes} are not equitable")
    for c in classes:
        cs = set(c)
        for v in c:
            close = {u for u, dist in bfs_distances(F, v).items() if 0 < dist <= ell}
            bad = close & cs
            if bad:
                problems.append(f"vertices {v} and {min(bad)} share a class at distance <= {ell}")
    return problems


def hajnal_szemeredi_partition(F: Graph, Delta: int, ell: int, h: int | None = None, *,
                               budget: int = 10_000) -> Partition:
    """Equitable partition of ``V(F)`` into ``h`` (default ``2 Delta^ell``)
    classes, each an independent set of the ``ell``-th power of ``F``.

    Greedy colouring plus move/swap repair, then an equitable-colouring
    fallback when ``h`` exceeds the power graph's maximum degree.  The result
    is always re-verified; classes may be empty when ``h > n``.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if F.max_degree > Delta:
        raise ValueError(f"F has maximum degree {F.max_degree} > {Delta}")
    h = 2 * Delta**ell if h is None else h
    if h < 1:
        raise ValueError("need at least one class")
    P = power_graph(F, ell) if F.n else F
    try:
        colour = _greedy(P, h)
        ok = _repair(P, colour, h, budget)
    except RebalancingBudgetExceeded:
        ok = False
    if not ok:
        if h < P.max_degree + 1:
            raise RebalancingBudgetExceeded(f"could not rebalance {h} classes and h <= Delta(F^ell)")
        log.debug("greedy repair stalled; using networkx equitable colouring")
        nxg = nx.Graph()
        nxg.add_nodes_from(range(P.n))
        nxg.add_edges_from(P.edges())
        colour_map = nx.equitable_color(nxg, h)
        colour = [colour_map[v] for v in range(P.n)]
    classes = [[] for _ in range(h)]
    for v, c in enumerate(colour):
        classes[c].append(v)
    problems = verify_distance_partition(F, classes, ell)
    if problems:
        raise RebalancingBudgetExceeded("; ".join(problems[:3]))
    return Partition([tuple(c) for c in classes])
