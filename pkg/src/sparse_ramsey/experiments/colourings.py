"""Edge-colouring strategies, from uniform to mildly adversarial."""

from __future__ import annotations

import numpy as np

from ..graph import EdgeColouring, Graph

STRATEGIES = ("random", "majority-split", "clique-hider")


def _symmetric(n: int, us: np.ndarray, vs: np.ndarray, cols: np.ndarray) -> np.ndarray:
    labels = np.full((n, n), -1, dtype=np.int8)
    labels[us, vs] = cols
    labels[vs, us] = cols
    return labels


def colour_edges(g: Graph, strategy: str, r: int, seed: int, *, sweeps: int = 2) -> EdgeColouring:
    """``random``: uniform and independent.  ``majority-split``: vertices get
    random balanced classes and edge ``uv`` gets ``(class v - class u) mod r``.
    ``clique-hider``: vertices arrive in random order and each colours its
    back edges to minimise monochromatic triangles with earlier edges."""
    if r < 1:
        raise ValueError("need at least one colour")
    rng = np.random.default_rng(seed)
    n = g.n
    us, vs = np.nonzero(np.triu(g.matrix, 1))
    if r == 1 or strategy == "random":
        cols = np.zeros(len(us), dtype=np.int8) if r == 1 else rng.integers(0, r, len(us)).astype(np.int8)
        return EdgeColouring.from_labels(g, r, _symmetric(n, us, vs, cols))
    if strategy == "majority-split":
        cls = rng.permutation(np.arange(n) % r)
        cols = ((cls[vs] - cls[us]) % r).astype(np.int8)
        return EdgeColouring.from_labels(g, r, _symmetric(n, us, vs, cols))
    if strategy == "clique-hider":
        return EdgeColouring.from_labels(g, r, _clique_hider(g, r, rng, sweeps))
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def _clique_hider(g: Graph, r: int, rng: np.random.Generator, sweeps: int) -> np.ndarray:
    n = g.n
    A = g.matrix
    labels = np.full((n, n), -1, dtype=np.int8)
    seen = np.zeros(n, dtype=bool)
    for v in rng.permutation(n).tolist():
        back = np.flatnonzero(A[v] & seen)
        seen[v] = True
        if not len(back):
            continue
        cols = rng.integers(0, r, len(back)).astype(np.int8)
        sub = labels[np.ix_(back, back)]
        for _ in range(sweeps):
            for i in range(len(back)):
                # triangles v-back_i-w that colour c would make monochromatic
                row = sub[i]
                hit = row == cols
                counts = np.bincount(cols[hit], minlength=r)
                best = np.flatnonzero(counts == counts.min())
                cols[i] = best[rng.integers(len(best))]
        labels[v, back] = cols
        labels[back, v] = cols
    return labels


def monochromatic_cliques(c: EdgeColouring, k: int = 4) -> int:
    """Number of monochromatic ``K_k`` (``k`` in 3, 4)."""
    total = 0
    for G in c.class_graphs:
        A = G.matrix.astype(np.int64)
        if k == 3:
            total += int(np.trace(A @ A @ A)) // 6
            continue
        if k != 4:
            raise ValueError("only k = 3 or 4")
        Ab = G.matrix
        count = 0
        for a in range(G.n):
            na = np.flatnonzero(Ab[a, a + 1:]) + a + 1
            if len(na) < 3:
                continue
            sub = A[np.ix_(na, na)]
            count += int(np.trace(sub @ sub @ sub)) // 6
        total += count
    return total
