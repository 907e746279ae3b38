"""Everything one embedding run needs to know about host, colour and parts."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from ..graph import Graph, OrderedGraph
from .constants import ConstantsPack
from .lookahead import LookaheadContext, build_all, build_segment_lookahead


@dataclass
class EmbeddingInstance:
    """``host`` is the random graph, ``G`` its colour-``chi`` subgraph,
    ``parts[i]`` the host vertices of ``V_i`` and ``phi[x]`` the part of
    ``F``-vertex ``x``.  ``q_allowed`` marks host vertices usable for a final
    segment ``Q`` (outside ``Z`` and all parts)."""

    host: Graph
    G: Graph
    parts: Sequence[Sequence[int]]
    phi: Sequence[int]
    og: OrderedGraph
    cp: ConstantsPack
    p: float
    segment: tuple[int, ...] | None = None
    q_allowed: np.ndarray | None = None
    verify_lookahead: bool = True
    lookaheads: dict[int, LookaheadContext] = field(default_factory=dict)
    segment_ctx: LookaheadContext | None = None

    def __post_init__(self):
        if len(self.phi) != self.og.n:
            raise ValueError("phi must assign a part to every vertex of F")
        if self.host.n != self.G.n:
            raise ValueError("host and colour graph must share a vertex set")
        self.parts = [np.asarray(sorted(P), dtype=np.int64) for P in self.parts]
        if any(not 0 <= c < len(self.parts) for c in self.phi):
            raise ValueError("phi refers to a missing part")
        qset = set(self.segment or ())
        if not self.lookaheads:
            self.lookaheads = build_all(self.og, self.cp, skip=qset, verify=self.verify_lookahead)
        if self.segment and self.segment_ctx is None:
            self.segment_ctx = build_segment_lookahead(self.og, self.segment, self.cp,
                                                       verify=self.verify_lookahead)
        if self.segment and self.q_allowed is None:
            mask = np.ones(self.host.n, dtype=bool)
            for P in self.parts:
                mask[P] = False
            self.q_allowed = mask

    @property
    def N(self) -> int:
        return self.host.n

    @cached_property
    def part_size(self) -> int:
        return min(len(P) for P in self.parts)

    @cached_property
    def part_masks(self) -> list[np.ndarray]:
        out = []
        for P in self.parts:
            m = np.zeros(self.N, dtype=bool)
            m[P] = True
            out.append(m)
        return out

    @cached_property
    def A(self) -> np.ndarray:
        return self.G.matrix

    @cached_property
    def B(self) -> np.ndarray:
        return self.host.matrix

    @cached_property
    def embed_order(self) -> tuple[int, ...]:
        qset = set(self.segment or ())
        return tuple(v for v in self.og.order if v not in qset)

    @cached_property
    def targets_of(self) -> dict[int, list]:
        """``x -> [y ...]`` (and ``"Q"``) for every lookahead containing ``x``."""
        out: dict[int, list] = {x: [] for x in range(self.og.n)}
        for y, ctx in self.lookaheads.items():
            for x in ctx.h1:
                out[x].append(y)
        if self.segment_ctx is not None:
            for x in self.segment_ctx.h1:
                out[x].append("Q")
        return out

    def context(self, target) -> LookaheadContext:
        return self.segment_ctx if target == "Q" else self.lookaheads[target]

    def promise_threshold(self, y: int) -> float:
        deg = self.og.left_degree(y)
        return 0.5 * (float(self.cp.d) * self.p) ** deg * self.part_size

    def phi_injective_on(self, vertices) -> bool:
        vs = list(vertices)
        return len({self.phi[v] for v in vs}) == len(vs)
