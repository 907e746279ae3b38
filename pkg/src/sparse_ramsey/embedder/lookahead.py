"""Lookahead subgraphs ``H1`` and their rooted cores ``H0`` for a vertex or a final segment."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..density import (
    SPENCER_LIMIT,
    FindRootsTrace,
    RootedPattern,
    classify_segment,
    findroots_trace,
    is_D_mu_spencer,
)
from ..graph import Graph, OrderedGraph
from .constants import ConstantsPack


class SpencerVerificationFailed(RuntimeError):
    pass


@dataclass
class LookaheadContext:
    """For a target ``y`` (or segment ``Q``): the vertices within left
    distance ``l1``, the boundary at distance exactly ``l1``, and the root set
    ``core`` (vertices of ``H0'``) grown from the left neighbourhood.

    ``h1`` excludes the target itself, i.e. it is ``V(H1')``; ``last`` is
    its latest vertex in the order.
    """

    target: int | tuple[int, ...]
    h1: frozenset[int]
    boundary: frozenset[int]
    seeds: frozenset[int]
    core: frozenset[int]
    distance: dict[int, int]
    trace: FindRootsTrace | None = None
    segment_kind: str | None = None
    h0_limit: int = 0
    last: int | None = None

    @property
    def is_segment(self) -> bool:
        return self.segment_kind is not None

    def violations(self, F: Graph) -> list[str]:
        """Structural invariants that fail for this context."""
        out = []
        if self.boundary & self.core:
            out.append(f"core meets the boundary at {sorted(self.boundary & self.core)}")
        h0 = set(self.core)
        if not self.is_segment:
            h0.add(self.target)
        if len(h0) > self.h0_limit:
            out.append(f"|V(H0)| = {len(h0)} exceeds h0 = {self.h0_limit}")
        if h0 and not F.induced(h0).graph.is_connected():
            out.append("H0 is not connected")
        return out


def _descending_distances(og: OrderedGraph, sources: Iterable[int], limit: int) -> dict[int, int]:
    rank = og.rank
    adj = og.graph.adj
    dist = {s: 0 for s in sources}
    frontier = list(dist)
    d = 0
    while frontier and d < limit:
        d += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if rank[v] < rank[u] and v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def _local_order(og: OrderedGraph, verts: Iterable[int]):
    sub = og.graph.induced(verts)
    order = sorted(sub.old, key=lambda v: og.rank[v])
    return sub, OrderedGraph(sub.graph, tuple(sub.new[v] for v in order))


def _grow_core(og: OrderedGraph, h1: frozenset[int], seeds: frozenset[int], cp: ConstantsPack,
               verify: bool, limit: int):
    if not h1:
        return frozenset(), None
    sub, local = _local_order(og, h1)
    trace = findroots_trace(local, (), sub.to_local(sorted(seeds)), cp.D, cp.mu, limit=limit)
    core_local = trace.roots
    if verify:
        ok, wit = is_D_mu_spencer(RootedPattern(sub.graph, core_local), cp.D, cp.mu)
        if not ok:
            raise SpencerVerificationFailed(
                f"(H1', core) not ({cp.D}, {cp.mu})-Spencer; witness {sub.to_parent(wit)}"
            )
    trace.roots = frozenset(sub.to_parent(core_local))
    trace.witnesses = [tuple(sub.to_parent(w)) for w in trace.witnesses]
    return trace.roots, trace


def build_lookahead(og: OrderedGraph, y: int, cp: ConstantsPack, *, verify: bool = True,
                    limit: int = SPENCER_LIMIT) -> LookaheadContext:
    dist = _descending_distances(og, [y], cp.l1)
    h1 = frozenset(v for v in dist if v != y)
    boundary = frozenset(v for v, d in dist.items() if d == cp.l1)
    seeds = og.left_neighbours(y)
    core, trace = _grow_core(og, h1, seeds, cp, verify, limit)
    last = max(h1, key=lambda v: og.rank[v]) if h1 else None
    return LookaheadContext(y, h1, boundary, seeds, core, dist, trace, None, cp.h0, last)


def build_segment_lookahead(og: OrderedGraph, Q: Sequence[int], cp: ConstantsPack, *,
                            verify: bool = True, limit: int = SPENCER_LIMIT) -> LookaheadContext:
    """``Q`` must be a final segment of the order inducing a path or cycle."""
    Q = tuple(int(q) for q in Q)
    kind = classify_segment(og.graph, Q)
    tail = set(og.order[len(og.order) - len(Q):])
    if tail != set(Q):
        raise ValueError("Q is not a final segment of the order")
    qset = set(Q)
    dist = _descending_distances(og, Q, cp.l1)
    h1 = frozenset(v for v in dist if v not in qset)
    boundary = frozenset(v for v in h1 if dist[v] == cp.l1)
    seeds = frozenset(u for q in Q for u in og.graph.adj[q] if u not in qset)
    core, trace = _grow_core(og, h1, seeds, cp, verify, limit)
    last = max(h1, key=lambda v: og.rank[v]) if h1 else None
    return LookaheadContext(Q, h1, boundary, seeds, core, dist, trace, kind, cp.h0, last)


def build_all(og: OrderedGraph, cp: ConstantsPack, *, skip: Iterable[int] = (),
              verify: bool = True) -> dict[int, LookaheadContext]:
    skip = set(skip)
    return {y: build_lookahead(og, y, cp, verify=verify) for y in og.order if y not in skip}
