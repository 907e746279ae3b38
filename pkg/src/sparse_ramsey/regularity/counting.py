"""Exact partite embedding counts and the predictions they are compared to."""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

import numpy as np

from ..density import classify_segment
from ..graph import Graph

PATTERN_LIMIT = 8


def _part_masks(G: Graph, parts: Sequence[Sequence[int]]) -> list[np.ndarray]:
    out = []
    for part in parts:
        m = np.zeros(G.n, dtype=bool)
        m[list(part)] = True
        out.append(m)
    return out


def _order(H: Graph, vertices: Sequence[int], placed: Sequence[int] = ()) -> list[int]:
    todo = list(vertices)
    done = set(placed)
    order = []
    while todo:
        v = max(todo, key=lambda u: (len(H.adj[u] & done), -u))
        order.append(v)
        done.add(v)
        todo.remove(v)
    return order


def _enumerate(G: Graph, H: Graph, masks: Sequence[np.ndarray], order: Sequence[int],
               visit: Callable[[dict[int, int]], None], fixed: Mapping[int, int] | None = None) -> None:
    """Call ``visit`` on every injective partite homomorphism of ``H[order]``
    (extending ``fixed``)."""
    a = G.matrix
    phi = dict(fixed or {})
    used = np.zeros(G.n, dtype=bool)
    for w in phi.values():
        used[w] = True
    back = [[u for u in H.adj[v] if u in phi or u in order[:i]] for i, v in enumerate(order)]

    def rec(i: int) -> None:
        if i == len(order):
            visit(phi)
            return
        v = order[i]
        cand = masks[v] & ~used
        for u in back[i]:
            cand &= a[phi[u]]
        for w in np.flatnonzero(cand).tolist():
            phi[v] = w
            used[w] = True
            rec(i + 1)
            used[w] = False
        phi.pop(v, None)

    rec(0)


def count_partite_embeddings(G: Graph, pattern: Graph, parts: Sequence[Sequence[int]],
                             limit: int = PATTERN_LIMIT) -> int:
    """Injective homomorphisms of ``pattern`` into ``G`` sending vertex ``x``
    into ``parts[x]``."""
    if len(parts) != pattern.n:
        raise ValueError("need one part per pattern vertex")
    if pattern.n > limit:
        raise ValueError(f"pattern has {pattern.n} vertices; limit is {limit}")
    if pattern.n == 0:
        return 1
    masks = _part_masks(G, parts)
    order = _order(pattern, range(pattern.n))
    a = G.matrix
    *head, last = order
    back_last = [u for u in pattern.adj[last]]
    total = 0

    def visit(phi):
        nonlocal total
        cand = masks[last].copy()
        for w in phi.values():
            cand[w] = False
        for u in back_last:
            cand &= a[phi[u]]
        total += int(cand.sum())

    _enumerate(G, pattern, masks, head, visit)
    return total


def predicted_partite_count(part_sizes: Sequence[int], densities: Mapping[tuple[int, int], float],
                            p: float) -> float:
    """``prod |V_x| * prod over edges of p d_xy``."""
    value = math.prod(float(s) for s in part_sizes)
    for d in densities.values():
        value *= float(p) * float(d)
    return value


def count_poor_embeddings(G: Graph, H: Graph, parts: Sequence[Sequence[int]], d: float, p: float,
                          y: int | None = None, limit: int = PATTERN_LIMIT) -> int:
    """Partite embeddings ``psi`` of ``H - y`` with
    ``|N_G(psi(N(y)); V_y)| < 3/4 (dp)^deg(y) |V_y|``; ``y`` defaults to the
    last vertex."""
    y = H.n - 1 if y is None else y
    if H.n > limit:
        raise ValueError(f"pattern has {H.n} vertices; limit is {limit}")
    masks = _part_masks(G, parts)
    nb = sorted(H.adj[y])
    threshold = 0.75 * (d * p) ** len(nb) * len(parts[y])
    a = G.matrix
    rest = [v for v in range(H.n) if v != y]
    poor = 0

    def visit(phi):
        nonlocal poor
        cand = masks[y].copy()
        for u in nb:
            cand &= a[phi[u]]
        if cand.sum() < threshold:
            poor += 1

    _enumerate(G, H, masks, _order(H, rest), visit)
    return poor


def count_noncompletion_embeddings(G: Graph, H: Graph, Q: Sequence[int], parts: Sequence[Sequence[int]],
                                   limit: int = PATTERN_LIMIT) -> int:
    """Partite embeddings of ``H - V(Q)`` that do not extend to a partite
    embedding of ``H``."""
    classify_segment(H, Q)
    if H.n > limit:
        raise ValueError(f"pattern has {H.n} vertices; limit is {limit}")
    masks = _part_masks(G, parts)
    qset = set(Q)
    rest = [v for v in range(H.n) if v not in qset]
    q_order = _order(H, list(Q), rest)
    bad = 0

    def visit(phi):
        nonlocal bad
        found = False

        def stop(_):
            nonlocal found
            found = True
            raise _Found

        try:
            _enumerate(G, H, masks, q_order, stop, fixed=dict(phi))
        except _Found:
            pass
        if not found:
            bad += 1

    _enumerate(G, H, masks, _order(H, rest), visit)
    return bad


class _Found(Exception):
    pass
