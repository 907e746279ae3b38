"""Exact density oracles: 2-density, maximum 2-density, Spencer density.

All values are :class:`fractions.Fraction`.  Subset maximisations are done by
vectorised enumeration of vertex bitmasks up to a configurable size; beyond
that, Spencer-type questions are answered exactly by a maximum-weight closure
(min-cut) computation, which is polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .graph import Graph, OrderedGraph

M2_LIMIT = 16
SPENCER_LIMIT = 18

HALF = Fraction(1, 2)


class InstanceTooLarge(ValueError):
    """The exponential oracle was asked about an instance above its limit."""


@dataclass(frozen=True)
class RootedPattern:
    h: Graph
    roots: frozenset[int] = frozenset()

    def __post_init__(self):
        roots = frozenset(int(v) for v in self.roots)
        self.h.check_vertices(roots)
        object.__setattr__(self, "roots", roots)

    @property
    def free(self) -> list[int]:
        return [v for v in range(self.h.n) if v not in self.roots]


@dataclass(frozen=True)
class DensityReport:
    value: Fraction
    witness: tuple[int, ...]


# -- subset enumeration helpers --------------------------------------------

def _local_masks(g: Graph, verts: Sequence[int]) -> list[int]:
    index = {v: i for i, v in enumerate(verts)}
    out = []
    for v in verts:
        m = 0
        for u in g.adj[v]:
            i = index.get(u)
            if i is not None:
                m |= 1 << i
        out.append(m)
    return out


def subset_edge_counts(g: Graph, verts: Sequence[int]) -> np.ndarray:
    """``e(S)`` for every subset ``S`` of ``verts``, indexed by bitmask."""
    k = len(verts)
    masks = _local_masks(g, verts)
    e = np.zeros(1 << k, dtype=np.int64)
    for i in range(k):
        lo = 1 << i
        prev = np.arange(lo, dtype=np.int64)
        e[lo : 2 * lo] = e[:lo] + np.bitwise_count(prev & masks[i])
    return e


def subset_sums(weights: Sequence[int]) -> np.ndarray:
    k = len(weights)
    s = np.zeros(1 << k, dtype=np.int64)
    for i, w in enumerate(weights):
        lo = 1 << i
        s[lo : 2 * lo] = s[:lo] + int(w)
    return s


def _mask_to_tuple(mask: int, verts: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted(verts[i] for i in range(len(verts)) if mask >> i & 1))


def _pick_witness(candidates: np.ndarray, verts: Sequence[int]) -> tuple[int, ...]:
    """Smallest candidate set, ties broken lexicographically."""
    sizes = np.bitwise_count(candidates)
    smallest = candidates[sizes == sizes.min()]
    return min(_mask_to_tuple(int(m), verts) for m in smallest)


def _argmax_fraction(num: np.ndarray, den: np.ndarray, valid: np.ndarray) -> tuple[Fraction, np.ndarray]:
    """Exact maximum of ``num/den`` over ``valid`` and the masks attaining it."""
    idx = np.flatnonzero(valid)
    ratio = num[idx] / den[idx]
    near = idx[ratio >= ratio.max() - 1e-9]
    best = max(Fraction(int(num[i]), int(den[i])) for i in near)
    hits = near[num[near] * best.denominator == den[near] * best.numerator]
    return best, hits


# -- 2-densities --------------------------------------------------------------

def d2(h: Graph) -> Fraction:
    if h.m == 0 or h.n < 3:
        # edgeless graphs and K_2 both get 1/2 by convention
        return HALF
    return Fraction(h.m - 1, h.n - 2)


def m2(h: Graph, limit: int = M2_LIMIT) -> DensityReport:
    """Maximum of ``d2`` over all subgraphs (vertex subsets suffice)."""
    if h.n > limit:
        raise InstanceTooLarge(f"m2 brute force limited to {limit} vertices, got {h.n}")
    verts = list(range(h.n))
    if h.m == 0:
        return DensityReport(HALF, tuple(verts[:1]))
    e = subset_edge_counts(h, verts)
    v = np.bitwise_count(np.arange(1 << h.n, dtype=np.int64)).astype(np.int64)
    valid = (v >= 3) & (e >= 1)
    if valid.any():
        best, hits = _argmax_fraction(e - 1, v - 2, valid)
    else:
        best, hits = HALF, np.empty(0, dtype=np.int64)
    if best <= HALF:
        u, w = next(iter(h.edges()))
        if best < HALF or not len(hits):
            return DensityReport(HALF, (u, w))
        hits = np.concatenate([hits, np.array([(1 << u) | (1 << w)])])
    return DensityReport(best, _pick_witness(hits, verts))


# -- Spencer density ----------------------------------------------------------

def _spencer_counts(rp: RootedPattern) -> tuple[list[int], np.ndarray, np.ndarray]:
    free = rp.free
    e = subset_edge_counts(rp.h, free)
    root_deg = [len(rp.h.adj[v] & rp.roots) for v in free]
    num = e + subset_sums(root_deg)
    size = np.bitwise_count(np.arange(1 << len(free), dtype=np.int64)).astype(np.int64)
    return free, num, size


def spencer_objective(h: Graph, X: Iterable[int], R: Iterable[int]) -> int:
    """``e(X) + e(X, R)`` for disjoint ``X`` and ``R``."""
    X, R = set(X), set(R)
    if X & R:
        raise ValueError("X must avoid the roots")
    return h.e(X) + h.e_between(X, R)


def _closure(h: Graph, free: Sequence[int], roots: frozenset[int], lam: Fraction,
             within: Iterable[int] | None = None) -> tuple[Fraction, frozenset[int]]:
    """Maximise ``e(X) + e(X, R) - lam |X|`` over ``X`` inside ``within``.

    Classic maximum-weight closure: edge items with weight 1 require both
    endpoints; vertices carry weight ``|N(v) & R| - lam``.  The minimal
    maximiser is the source side of a minimum cut.
    """
    pool = set(free if within is None else within)
    scale = lam.denominator
    net = nx.DiGraph()
    net.add_node("s")
    net.add_node("t")
    positive = 0
    for v in pool:
        w = scale * len(h.adj[v] & roots) - lam.numerator
        if w > 0:
            net.add_edge("s", ("v", v), capacity=w)
            positive += w
        elif w < 0:
            net.add_edge(("v", v), "t", capacity=-w)
    for v in pool:
        for u in h.adj[v]:
            if u in pool and v < u:
                item = ("e", v, u)
                net.add_edge("s", item, capacity=scale)
                positive += scale
                net.add_edge(item, ("v", v))
                net.add_edge(item, ("v", u))
    if positive == 0:
        return Fraction(0), frozenset()
    cut, (side, _) = nx.minimum_cut(net, "s", "t")
    X = frozenset(node[1] for node in side if isinstance(node, tuple) and node[0] == "v")
    return Fraction(positive - cut, scale), X


def spencer_density(rp: RootedPattern, limit: int = SPENCER_LIMIT, method: str = "auto") -> DensityReport:
    """``max (e(X) + e(X, R)) / |X|`` over nonempty ``X`` avoiding the roots.

    ``method`` is ``"brute"`` (subset enumeration, at most ``limit`` free
    vertices), ``"flow"`` (parametric min-cut) or ``"auto"``.
    """
    free = rp.free
    if not free:
        raise ValueError("every vertex is a root; Spencer density undefined")
    if method == "auto":
        method = "brute" if len(free) <= limit else "flow"
    if method == "brute":
        if len(free) > limit:
            raise InstanceTooLarge(f"Spencer brute force limited to {limit} free vertices, got {len(free)}")
        free, num, size = _spencer_counts(rp)
        best, hits = _argmax_fraction(num, np.maximum(size, 1), size >= 1)
        return DensityReport(best, _pick_witness(hits, free))
    if method != "flow":
        raise ValueError(f"unknown method {method!r}")
    # Dinkelbach iteration; each step strictly raises lam and there are
    # finitely many candidate ratios.
    X = frozenset(free)
    lam = Fraction(spencer_objective(rp.h, X, rp.roots), len(X))
    while True:
        gain, Y = _closure(rp.h, free, rp.roots, lam)
        if gain <= 0 or not Y:
            return DensityReport(lam, tuple(sorted(X)))
        X = Y
        lam = Fraction(spencer_objective(rp.h, X, rp.roots), len(X))


def is_D_mu_spencer(rp: RootedPattern, D: int, mu, limit: int = SPENCER_LIMIT,
                    method: str = "auto") -> tuple[bool, tuple[int, ...] | None]:
    """Whether ``e(X) + e(X, R) <= (D + mu)|X|`` for every ``X``.

    On failure the density-maximising ``X`` is returned as witness.
    """
    if not rp.free:
        return True, None
    report = spencer_density(rp, limit=limit, method=method)
    if report.value <= D + Fraction(mu):
        return True, None
    return False, report.witness


def minimal_violating_set(h: Graph, roots: Iterable[int], lam: Fraction,
                          limit: int = SPENCER_LIMIT) -> tuple[int, ...] | None:
    """An inclusion-minimal ``X`` with ``e(X) + e(X, R) > lam |X|``, or ``None``.

    With at most ``limit`` free vertices the smallest such set (ties broken
    lexicographically) is returned.  Above that, a violating closure is shrunk
    until no proper subset violates.
    """
    rp = RootedPattern(h, frozenset(roots))
    free = rp.free
    if not free:
        return None
    if len(free) <= limit:
        free, num, size = _spencer_counts(rp)
        bad = np.flatnonzero(num * lam.denominator > size * lam.numerator)
        if not len(bad):
            return None
        return _pick_witness(bad, free)
    gain, X = _closure(h, free, rp.roots, lam)
    if gain <= 0:
        return None
    shrinking = True
    while shrinking:
        shrinking = False
        for v in sorted(X):
            sub_gain, Y = _closure(h, free, rp.roots, lam, within=X - {v})
            if sub_gain > 0:
                X = Y
                shrinking = True
                break
    return tuple(sorted(X))


# -- root augmentation ------------------------------------------------------------

@dataclass
class FindRootsTrace:
    roots: frozenset[int]
    sizes: list[int] = field(default_factory=list)
    witnesses: list[tuple[int, ...]] = field(default_factory=list)
    bound: Fraction = Fraction(0)


def findroots_trace(og: OrderedGraph, I: Iterable[int], T: Iterable[int], D: int, mu,
                    limit: int = SPENCER_LIMIT) -> FindRootsTrace:
    """Grow ``T`` by minimal violating sets until ``(H, I | T')`` is (D, mu)-Spencer."""
    mu = Fraction(mu)
    if mu <= 0:
        raise ValueError("mu must be positive")
    if og.max_left_degree > D:
        raise ValueError(f"order is not {D}-degenerate (max left degree {og.max_left_degree})")
    I = frozenset(I)
    if I != frozenset(og.order[: len(I)]):
        raise ValueError("I is not an initial segment of the order")
    Ti = frozenset(T)
    og.graph.check_vertices(Ti)
    lam = D + mu
    trace = FindRootsTrace(Ti, [len(Ti)], [], Fraction(D * D * len(Ti) ** 2) / mu)
    while True:
        X = minimal_violating_set(og.graph, I | Ti, lam, limit=limit)
        if X is None:
            break
        Ti = Ti | frozenset(X)
        trace.witnesses.append(X)
        trace.sizes.append(len(Ti))
    trace.roots = Ti
    return trace


def findroots(og: OrderedGraph, I: Iterable[int], T: Iterable[int], D: int, mu,
              limit: int = SPENCER_LIMIT) -> frozenset[int]:
    return findroots_trace(og, I, T, D, mu, limit).roots


# -- duplication ----------------------------------------------------------------

def classify_segment(h: Graph, Q: Sequence[int]) -> str:
    """``"path"`` or ``"cycle"`` if ``Q`` (in order) induces one; else raise."""
    Q = [int(q) for q in Q]
    h.check_vertices(Q)
    if len(set(Q)) != len(Q) or not Q:
        raise ValueError("Q must be a nonempty sequence of distinct vertices")
    k = len(Q)
    consecutive = {frozenset((Q[i], Q[i + 1])) for i in range(k - 1)}
    inside = {frozenset((u, v)) for u in Q for v in h.adj[u] if v in set(Q)}
    if inside == consecutive:
        return "path"
    if k >= 3 and inside == consecutive | {frozenset((Q[-1], Q[0]))}:
        return "cycle"
    raise ValueError("Q does not induce a path or cycle in the given order")


def duplicate_along(h: Graph, Q: Sequence[int]) -> Graph:
    """Add a copy ``y'`` of each ``y`` in ``Q``; ``y'`` copies ``h[Q]`` and is
    joined to ``N(y) - Q``.  Copy of ``Q[i]`` gets label ``h.n + i``."""
    classify_segment(h, Q)
    qset = set(Q)
    copy = {q: h.n + i for i, q in enumerate(Q)}
    edges = list(h.edges())
    for q in Q:
        for u in h.adj[q]:
            if u in qset:
                if q < u:
                    edges.append((copy[q], copy[u]))
            else:
                edges.append((copy[q], u))
    return Graph(h.n + len(Q), edges)
