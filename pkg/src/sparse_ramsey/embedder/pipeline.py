"""End-to-end monochromatic embedding: decompose, select, partition, grow, injectivize."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from ..graph import EdgeColouring, Graph, OrderedGraph, bfs_distances, degeneracy_order
from ..regularity import (
    IterationBudgetExceeded,
    NoMonochromaticClique,
    select_colour_and_parts,
    strengthened_srl,
)
from .cn import cn_injectivize
from .constants import ConstantsPack
from .extensions import complete_segment
from .growth import GrowthOracle
from .hsz import RebalancingBudgetExceeded, hajnal_szemeredi_partition
from .instance import EmbeddingInstance

log = logging.getLogger(__name__)


@dataclass
class RegularityConfig:
    eps: float = 0.3
    k0: int = 5
    fine_split: int = 4
    first_split: int = 1
    samples: int = 32
    max_iterations: int = 6
    spectral: bool | str = False

    def run(self, graphs, p, seed: int):
        eps = self.eps
        return strengthened_srl(graphs, eps, lambda k: eps, self.k0, p, fine_split=self.fine_split,
                                first_split=self.first_split, max_iterations=self.max_iterations,
                                samples=self.samples, seed=seed, spectral=self.spectral)


@dataclass
class EmbedReport:
    success: bool
    embedding: list[tuple[int, int]]
    colour: int | None
    trajectory: dict
    stage: str | None = None
    error: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = asdict(self)
        out["embedding"] = [list(pair) for pair in self.embedding]
        return out


class StageFailure(RuntimeError):
    def __init__(self, stage: str, message: str, diagnostics: dict | None = None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.diagnostics = diagnostics or {}


def verify_embedding(F: Graph, colouring: EdgeColouring, colour: int, embedding) -> list[str]:
    """Problems with ``embedding`` as a colour-``colour`` copy of ``F``; empty if none."""
    emb = dict(embedding)
    out = []
    if set(emb) != set(range(F.n)):
        out.append(f"embedding covers {len(emb)} of {F.n} vertices")
    images = list(emb.values())
    if len(set(images)) != len(images):
        out.append("embedding is not injective")
    for u, v in F.edges():
        if u not in emb or v not in emb:
            continue
        a, b = emb[u], emb[v]
        if a == b or not colouring.graph.has_edge(a, b):
            out.append(f"edge {u}-{v} maps to non-edge {a}-{b}")
        elif colouring.colour(a, b) != colour:
            out.append(f"edge {u}-{v} maps to colour {colouring.colour(a, b)}")
    return out


def segment_length(mu) -> int:
    """``2/mu`` rounded to the nearest even integer, at least 4."""
    return max(4, 2 * round(1 / float(mu)))


def shortest_cycle(g: Graph) -> list[int] | None:
    """Vertices of a shortest cycle, in cyclic order (BFS from every vertex)."""
    best = None
    for s in range(g.n):
        parent = {s: None}
        depth = {s: 0}
        queue = [s]
        for u in queue:
            if best is not None and 2 * depth[u] + 1 >= len(best):
                break
            for w in sorted(g.adj[u]):
                if w not in depth:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w and depth[w] >= depth[u]:
                    a, b = [u], [w]
                    while a[-1] != b[-1]:
                        if depth[a[-1]] >= depth[b[-1]]:
                            a.append(parent[a[-1]])
                        else:
                            b.append(parent[b[-1]])
                    cyc = a + b[-2::-1]
                    if best is None or len(cyc) < len(best):
                        best = cyc
    return best


def find_k4(G: Graph, forbidden: np.ndarray, rng: np.random.Generator) -> tuple[int, ...] | None:
    A = G.matrix
    ok = ~forbidden
    for a in rng.permutation(G.n).tolist():
        if not ok[a]:
            continue
        na = A[a] & ok
        for b in np.flatnonzero(na).tolist():
            nab = na & A[b]
            for c in np.flatnonzero(nab).tolist():
                nabc = nab & A[c]
                if nabc.any():
                    return a, b, c, int(np.flatnonzero(nabc)[0])
    return None


def _phi_from_classes(n: int, classes) -> list[int]:
    phi = [0] * n
    for i, cls in enumerate(classes):
        for v in cls:
            phi[v] = i
    return phi


def _embed_component(og: OrderedGraph, host: Graph, G: Graph, parts, cp: ConstantsPack, p: float, *,
                     segment: tuple[int, ...] | None, forbidden: np.ndarray, seed: int, method: str,
                     audit: bool, policy: str) -> tuple[dict[int, int], dict]:
    stage = "partition"
    try:
        classes = hajnal_szemeredi_partition(og.graph, cp.Delta, cp.hsz_distance, cp.h1).blocks
    except RebalancingBudgetExceeded as exc:
        raise StageFailure(stage, str(exc)) from exc
    phi = _phi_from_classes(og.n, classes)
    q_allowed = None
    if segment:
        q_allowed = ~forbidden
        for P in parts:
            q_allowed[list(P)] = False
    inst = EmbeddingInstance(host, G, parts, phi, og, cp, p, segment=segment, q_allowed=q_allowed)
    collisions = [str(y) for y, ctx in inst.lookaheads.items()
                  if not inst.phi_injective_on(set(ctx.h1) | {y})]
    oracle = GrowthOracle(inst, method=method, audit=audit)
    rng = np.random.default_rng(seed)
    cn = cn_injectivize(host.n, inst.embed_order, oracle, float(cp.rho), cp.D, p, cp.Delta, rng=rng,
                        left_degree=og.left_degree, policy=policy, commit=oracle.commit)
    st = oracle.state
    diag = {
        "part_size": inst.part_size,
        "phi_collisions": collisions,
        "ind1_violations": len(st.ind1_violations),
        "ind2_violations": len(st.ind2_violations),
        "boundary_violations": len(st.boundary_violations),
        "deferred": sum(len(s.deferred) for s in st.steps),
        "crossed": sum(sum(s.C.values()) for s in st.steps),
        "cn": cn.to_json(),
        "trajectory": st.trajectory(),
    }
    if not cn.success:
        raise StageFailure("embedding", f"no free candidate at F-vertex {cn.failed_at}", diag)
    psi = dict(cn.psi)
    if segment:
        allowed = q_allowed.copy()
        allowed[list(psi.values())] = False
        done = complete_segment(G.matrix, og.graph, segment, psi, allowed)
        if done is None:
            raise StageFailure("completion", f"segment {list(segment)} has no completion", diag)
        psi.update(done)
    return psi, diag


def _segment_order(F: Graph, D: int, mu) -> tuple[OrderedGraph, tuple[int, ...]]:
    cyc = shortest_cycle(F)
    if cyc is None:
        raise StageFailure("setup", "regular component without a cycle")
    k = segment_length(mu)
    Q = tuple(cyc) if len(cyc) <= k else tuple(cyc[:k])
    rest = [v for v in range(F.n) if v not in set(Q)]
    sub = F.induced(rest)
    og_rest, deg = degeneracy_order(sub.graph)
    if deg > D:
        raise StageFailure("setup", f"component minus Q is {deg}-degenerate, need {D}")
    order = tuple(sub.to_parent(og_rest.order)) + Q
    return OrderedGraph(F, order), Q


def embed_monochromatic(F: Graph, host: Graph, colouring: EdgeColouring, cp: ConstantsPack, p: float, *,
                        mode: str = "degenerate", seed: int = 0, regularity: RegularityConfig | None = None,
                        decomposition=None, method: str = "estimate", audit: bool = False,
                        policy: str = "random", reserve: bool = False) -> EmbedReport:
    """Find a monochromatic copy of ``F`` in the coloured host.

    ``mode="degenerate"`` embeds all of ``F`` in one degeneracy-order pass.
    ``mode="maxdegree"`` embeds the components one at a time avoiding earlier
    images: ``K4`` components by direct search, ``Delta``-regular components
    by growing ``F' - Q`` and completing a short cycle or path ``Q`` outside
    the parts, the rest as in degenerate mode.
    """
    t0 = time.perf_counter()
    regularity = regularity or RegularityConfig()
    if mode not in ("degenerate", "maxdegree"):
        raise ValueError(f"unknown mode {mode!r}")
    if F.m == 0:
        if F.n > host.n:
            return EmbedReport(False, [], None, {}, "setup", "host has too few vertices")
        return EmbedReport(True, [(v, v) for v in range(F.n)], 0, {"steps": 0})
    if F.max_degree > cp.Delta:
        return EmbedReport(False, [], None, {}, "setup", f"max degree {F.max_degree} exceeds {cp.Delta}")
    graphs = colouring.class_graphs
    diagnostics: dict = {"timings": {}}
    stage = "regularity"
    try:
        decomp = decomposition
        if decomp is None:
            decomp = regularity.run(graphs, p, seed)
        diagnostics["timings"]["regularity"] = time.perf_counter() - t0
        diagnostics["coarse_parts"] = len(decomp.coarse)
        diagnostics["fine_parts"] = len(decomp.fine)
        stage = "selection"
        sel = select_colour_and_parts(decomp, graphs, colouring.r, cp.h1, d=cp.d, reserve=reserve)
        chi = sel.colour
        diagnostics["selection_rule"] = sel.rule
        G = graphs[chi]
        embedding: dict[int, int] = {}
        stage = "embedding"
        if mode == "degenerate":
            og, D = degeneracy_order(F)
            if D > cp.D:
                raise StageFailure("setup", f"F is {D}-degenerate, constants allow {cp.D}")
            psi, diag = _embed_component(og, host, G, sel.parts, cp, p, segment=None,
                                         forbidden=np.zeros(host.n, dtype=bool), seed=seed,
                                         method=method, audit=audit, policy=policy)
            embedding.update(psi)
            diagnostics["components"] = [dict(diag, kind="degenerate")]
        else:
            diagnostics["components"] = []
            used = np.zeros(host.n, dtype=bool)
            rng = np.random.default_rng(seed)
            for ci, comp in enumerate(F.components()):
                sub = F.induced(comp)
                Fc = sub.graph
                Z = np.flatnonzero(used)
                if Fc.n == 4 and Fc.m == 6:
                    stage = "k4"
                    k4 = find_k4(G, used, rng)
                    if k4 is None:
                        raise StageFailure(stage, "no K4 of the chosen colour avoids earlier images")
                    psi = dict(zip(range(4), k4))
                    diag = {"kind": "k4"}
                else:
                    stage = "selection"
                    sel_c = select_colour_and_parts(decomp, graphs, colouring.r, cp.h1, Z=Z.tolist(),
                                                    d=cp.d, reserve=reserve, colour=chi)
                    stage = "embedding"
                    regular = Fc.n > 1 and all(Fc.degree(v) == cp.Delta for v in range(Fc.n))
                    if regular:
                        og, Q = _segment_order(Fc, cp.D, cp.mu)
                    else:
                        og, D = degeneracy_order(Fc)
                        Q = None
                        if D > cp.D:
                            raise StageFailure("setup", f"component {ci} is {D}-degenerate")
                    psi, diag = _embed_component(og, host, G, sel_c.parts, cp, p, segment=Q,
                                                 forbidden=used.copy(), seed=seed + 7919 * (ci + 1),
                                                 method=method, audit=audit, policy=policy)
                    diag["kind"] = "regular" if regular else "degenerate"
                    if Q:
                        diag["segment"] = [int(q) for q in Q]
                for v, w in psi.items():
                    embedding[sub.old[v]] = w
                    used[w] = True
                diag["component"] = ci
                diagnostics["components"].append(diag)
    except StageFailure as exc:
        diagnostics.update(exc.diagnostics)
        diagnostics["timings"]["total"] = time.perf_counter() - t0
        return EmbedReport(False, [], None, _trajectory(diagnostics), exc.stage, str(exc), diagnostics)
    except (IterationBudgetExceeded, NoMonochromaticClique) as exc:
        diagnostics["timings"]["total"] = time.perf_counter() - t0
        return EmbedReport(False, [], None, {}, stage, str(exc), diagnostics)
    problems = verify_embedding(F, colouring, chi, embedding)
    diagnostics["timings"]["total"] = time.perf_counter() - t0
    if problems:
        return EmbedReport(False, sorted(embedding.items()), chi, _trajectory(diagnostics), "verification",
                           "; ".join(problems[:5]), diagnostics)
    return EmbedReport(True, sorted(embedding.items()), chi, _trajectory(diagnostics), None, None, diagnostics)


def _trajectory(diagnostics: dict) -> dict:
    comps = diagnostics.get("components", [])
    if "trajectory" in diagnostics and not comps:
        comps = [diagnostics]
    out = {"steps": 0, "W_sizes": [], "C_sizes": [], "failures": []}
    for c in comps:
        t = c.get("trajectory")
        if not t:
            continue
        out["steps"] += t["steps"]
        out["W_sizes"] += t["W_sizes"]
        out["C_sizes"] += t["C_sizes"]
        out["failures"] += t["failures"]
    return out
