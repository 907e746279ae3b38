"""Promising/completable classification and counts of bad lookahead extensions."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..graph import Graph
from .instance import EmbeddingInstance
from .lookahead import LookaheadContext

EXTENSION_LIMIT = 10


class TooLarge(ValueError):
    pass


def promise_count(A: np.ndarray, part: np.ndarray, images: Sequence[int]) -> int:
    """``|N_G(images) ∩ part|`` for a boolean adjacency matrix ``A``."""
    rows = part
    mask = np.ones(len(part), dtype=bool)
    for w in images:
        mask &= A[w, rows]
    return int(mask.sum())


def is_promising(G: Graph, parts, phi, ctx: LookaheadContext, psi0: Mapping[int, int], d, p,
                 K: float, N: int, F: Graph | None = None) -> bool:
    """True iff the images of the ``H0``-neighbours of the target keep at
    least ``1/2 (dp)^deg N/K`` common ``G``-neighbours in the target's part.

    The ``H0``-neighbours are ``ctx.seeds`` unless ``F`` is given, in which
    case they are read off ``F``.
    """
    y = ctx.target
    nb = ctx.seeds if F is None else frozenset(F.adj[y]) & ctx.core
    missing = [a for a in nb if a not in psi0]
    if missing:
        raise ValueError(f"psi0 does not cover H0-neighbours {sorted(missing)}")
    part = np.asarray(sorted(parts[phi[y]]), dtype=np.int64)
    thr = 0.5 * (float(d) * float(p)) ** len(nb) * N / K
    return promise_count(G.matrix, part, [psi0[a] for a in nb]) >= thr


def complete_segment(A: np.ndarray, F: Graph, Q: Sequence[int], images: Mapping[int, int],
                     allowed: np.ndarray) -> dict[int, int] | None:
    """Backtracking search for an injective image of ``Q`` inside ``allowed``
    that keeps every ``F``-edge at ``Q`` a ``G``-edge; ``None`` if there is none."""
    Q = list(Q)
    qset = set(Q)
    placed = dict(images)
    used = np.zeros(A.shape[0], dtype=bool)
    used[list(placed.values())] = True
    # place the vertex with most placed neighbours first
    order: list[int] = []
    done = set(placed)
    todo = list(Q)
    while todo:
        q = max(todo, key=lambda u: (len(F.adj[u] & done), -u))
        order.append(q)
        done.add(q)
        todo.remove(q)
    outside = {q: [u for u in F.adj[q] if u not in qset] for q in Q}
    missing = [u for q in Q for u in outside[q] if u not in placed]
    if missing:
        raise ValueError(f"images do not cover neighbours {sorted(set(missing))} of Q")
    base = {}
    for q in Q:
        m = allowed.copy()
        for u in outside[q]:
            m &= A[placed[u]]
        base[q] = m
    back = {q: [u for u in F.adj[q] if u in qset and order.index(u) < order.index(q)] for q in Q}

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        q = order[i]
        cand = base[q] & ~used
        for u in back[q]:
            cand &= A[placed[u]]
        for w in np.flatnonzero(cand).tolist():
            placed[q] = w
            used[w] = True
            if rec(i + 1):
                return True
            used[w] = False
            del placed[q]
        return False

    if not rec(0):
        return None
    return {q: placed[q] for q in Q}


def is_completable(G: Graph, parts, F: Graph, ctx: LookaheadContext, psi0: Mapping[int, int],
                   Z=(), *, witness: bool = False):
    """Whether ``psi0`` extends over the segment ``ctx.target`` using only
    vertices outside ``Z`` and all parts.  With ``witness`` returns
    ``(bool, completion)``."""
    Q = tuple(ctx.target) if ctx.is_segment else ()
    allowed = np.ones(G.n, dtype=bool)
    for P in parts:
        allowed[list(P)] = False
    allowed[list(Z)] = False
    found = complete_segment(G.matrix, F, Q, psi0, allowed) if Q else {}
    if witness:
        return found is not None, found
    return found is not None


class _Classifier:
    """Decides badness of a full image of the core of one target."""

    def __init__(self, inst: EmbeddingInstance, target):
        self.inst = inst
        self.ctx = inst.context(target)
        self.segment = self.ctx.is_segment
        if self.segment:
            self.Q = tuple(self.ctx.target)
        else:
            y = self.ctx.target
            self.nb = tuple(sorted(inst.og.left_neighbours(y)))
            self.part = inst.parts[inst.phi[y]]
            self.thr = inst.promise_threshold(y)

    def base(self, images: Mapping[int, int]) -> np.ndarray:
        A = self.inst.A
        mask = np.ones(len(self.part), dtype=bool)
        for a in self.nb:
            if a in images:
                mask &= A[images[a], self.part]
        return mask

    def bad(self, images: Mapping[int, int]) -> bool:
        if self.segment:
            return complete_segment(self.inst.A, self.inst.og.graph, self.Q, images,
                                    self.inst.q_allowed) is None
        return int(self.base(images).sum()) < self.thr

    def bad_last(self, images: dict[int, int], u: int, cands: np.ndarray) -> int:
        """Number of ``w in cands`` for which ``images + {u: w}`` is bad."""
        if not len(cands):
            return 0
        if self.segment:
            out = 0
            for w in cands.tolist():
                images[u] = w
                out += self.bad(images)
            del images[u]
            return out
        if u not in self.nb:
            return len(cands) if self.bad(images) else 0
        cols = self.part[self.base(images)]
        counts = self.inst.A[np.ix_(cands, cols)].sum(axis=1)
        return int((counts < self.thr).sum())


def _h1_graph_neighbours(inst: EmbeddingInstance, ctx: LookaheadContext, u: int) -> list[int]:
    return [w for w in inst.og.graph.adj[u] if w in ctx.h1]


def core_constraints(inst: EmbeddingInstance, ctx: LookaheadContext, U: Sequence[int],
                     images: Mapping[int, int]) -> dict[int, tuple[np.ndarray, list[int]]]:
    """For each unembedded core vertex ``u``: the fixed candidate mask (part,
    ``G``-edges to embedded core images, host edges to embedded non-core
    images) and the earlier vertices of ``U`` it must be ``G``-adjacent to."""
    out = {}
    Uset = set(U)
    for i, u in enumerate(U):
        m = inst.part_masks[inst.phi[u]].copy()
        later = []
        for w in _h1_graph_neighbours(inst, ctx, u):
            if w in images:
                m &= inst.A[images[w]] if w in ctx.core else inst.B[images[w]]
            elif w in Uset and U.index(w) < i:
                later.append(w)
        out[u] = (m, later)
    return out


def bad_core_completions(inst: EmbeddingInstance, target, images: dict[int, int], U: Sequence[int],
                         clf: _Classifier | None = None) -> int:
    """Number of injective partite ``G``-completions of the core vertices
    ``U`` (given ``images`` of the embedded part of ``H1'``) that are bad."""
    clf = clf or _Classifier(inst, target)
    ctx = clf.ctx
    if not U:
        return int(clf.bad(images))
    cons = core_constraints(inst, ctx, list(U), images)
    used = np.zeros(inst.N, dtype=bool)
    used[list(images.values())] = True
    A = inst.A

    def rec(i: int) -> int:
        u = U[i]
        m, back = cons[u]
        cand = m & ~used
        for w in back:
            cand &= A[images[w]]
        idx = np.flatnonzero(cand)
        if i == len(U) - 1:
            return clf.bad_last(images, u, idx)
        total = 0
        for w in idx.tolist():
            images[u] = w
            used[w] = True
            total += rec(i + 1)
            used[w] = False
        images.pop(u, None)
        return total

    return rec(0)


def enumerate_extensions(inst: EmbeddingInstance, psi: Mapping[int, int], target,
                         limit: int = EXTENSION_LIMIT) -> tuple[int, int]:
    """Exact ``(total, bad)`` over extensions of ``psi`` to ``H1'`` of
    ``target``: injective, partite ``G``-embeddings on the core, arbitrary
    host homomorphisms elsewhere.  Bad means unpromising (resp. not
    completable) on the core."""
    clf = _Classifier(inst, target)
    ctx = clf.ctx
    images = {v: psi[v] for v in ctx.h1 if v in psi}
    free = [v for v in ctx.h1 if v not in images]
    if len(free) > limit:
        raise TooLarge(f"{len(free)} unembedded lookahead vertices; limit is {limit}")
    rank = inst.og.rank
    U = sorted((v for v in free if v in ctx.core), key=lambda v: rank[v])
    rest = sorted((v for v in free if v not in ctx.core), key=lambda v: rank[v])
    cons = core_constraints(inst, ctx, U, images)
    used = np.zeros(inst.N, dtype=bool)
    used[list(images.values())] = True
    A, B = inst.A, inst.B
    adj = inst.og.graph.adj

    def count_rest(j: int) -> int:
        if j == len(rest):
            return 1
        u = rest[j]
        cand = ~used
        for w in adj[u]:
            if w in images and (w in ctx.h1):
                cand = cand & B[images[w]]
        idx = np.flatnonzero(cand)
        if j == len(rest) - 1:
            return len(idx)
        total = 0
        for w in idx.tolist():
            images[u] = w
            used[w] = True
            total += count_rest(j + 1)
            used[w] = False
        images.pop(u, None)
        return total

    tot = bad = 0

    def rec(i: int) -> None:
        nonlocal tot, bad
        if i == len(U):
            c = count_rest(0)
            tot += c
            if c and clf.bad(images):
                bad += c
            return
        u = U[i]
        m, back = cons[u]
        cand = m & ~used
        for w in back:
            cand &= A[images[w]]
        for w in np.flatnonzero(cand).tolist():
            images[u] = w
            used[w] = True
            rec(i + 1)
            used[w] = False
        images.pop(u, None)

    rec(0)
    return tot, bad


def lookahead_budget(inst: EmbeddingInstance, target, x: int) -> tuple[int, int, float]:
    """``(v, e, kappa^(v+1) N^v p^e)`` once ``x`` is embedded: ``v`` counts
    vertices of ``H1'`` after ``x`` and ``e`` the ``H1'`` edges touching them."""
    ctx = inst.context(target)
    rank = inst.og.rank
    later = {u for u in ctx.h1 if rank[u] > rank[x]}
    e = sum(1 for u in later for w in inst.og.graph.adj[u]
            if w in ctx.h1 and (w not in later or w > u))
    kappa = float(inst.cp.kappa)
    return len(later), e, kappa ** (len(later) + 1) * float(inst.N) ** len(later) * inst.p ** e
