"""Simple undirected graphs on vertex set ``0..n-1`` and vertex orders.

Everything else in the package is built on :class:`Graph`.  Graphs are
immutable; derived views (bitmasks, dense adjacency matrix) are computed
lazily and cached.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

#: Sentinel for "no path".  ``math.inf`` compares correctly with integers and
#: never overflows.
INF = math.inf


class Graph:
    """Simple undirected graph with vertices ``0..n-1``.

    A graph is backed either by neighbour sets or, for large dense hosts, by a
    boolean adjacency matrix; the other view is derived on first use.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.n = n
        self.__dict__["adj"] = tuple(frozenset(s) for s in nbrs)

    @classmethod
    def from_adjacency(cls, adj: Sequence[Iterable[int]]) -> "Graph":
        g = cls.__new__(cls)
        g.n = len(adj)
        g.__dict__["adj"] = tuple(frozenset(int(v) for v in a) for a in adj)
        for u, a in enumerate(g.adj):
            if u in a:
                raise ValueError(f"self-loop at {u}")
            for v in a:
                if u not in g.adj[v]:
                    raise ValueError(f"asymmetric adjacency at ({u}, {v})")
        return g

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "Graph":
        """Build from a symmetric boolean matrix with zero diagonal."""
        a = np.asarray(matrix, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if a.diagonal().any():
            raise ValueError("adjacency matrix has a non-zero diagonal")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency matrix is not symmetric")
        g = cls.__new__(cls)
        g.n = a.shape[0]
        a = a.copy()
        a.setflags(write=False)
        g.__dict__["matrix"] = a
        return g

    @cached_property
    def adj(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(np.flatnonzero(row).tolist()) for row in self.matrix)

    @property
    def matrix_backed(self) -> bool:
        return "adj" not in self.__dict__

    # -- basic queries -------------------------------------------------

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph) or self.n != other.n:
            return False
        if self.matrix_backed or other.matrix_backed:
            return bool(np.array_equal(self.matrix, other.matrix))
        return self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.m))

    @cached_property
    def m(self) -> int:
        if self.matrix_backed:
            return int(self.matrix.sum()) // 2
        return sum(len(a) for a in self.adj) // 2

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> Iterator[tuple[int, int]]:
        if self.matrix_backed:
            us, vs = np.nonzero(np.triu(self.matrix, 1))
            yield from zip(us.tolist(), vs.tolist())
            return
        for u, a in enumerate(self.adj):
            for v in sorted(a):
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        if self.matrix_backed:
            return bool(self.matrix[u, v])
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        if self.matrix_backed:
            return int(self.matrix[v].sum())
        return len(self.adj[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        if self.matrix_backed:
            return self.matrix.sum(axis=1)
        return np.array([len(a) for a in self.adj], dtype=np.int64)

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhoods as integer bitmasks (bit ``v`` set iff adjacent)."""
        out = []
        for a in self.adj:
            m = 0
            for v in a:
                m |= 1 << v
            out.append(m)
        return tuple(out)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense boolean adjacency matrix; read-only."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, nb in enumerate(self.adj):
            if nb:
                a[u, list(nb)] = True
        a.setflags(write=False)
        return a

    # -- edge counters -------------------------------------------------

    def check_vertices(self, vs: Iterable[int]) -> None:
        for v in vs:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range for n={self.n}")

    def e(self, X: Iterable[int]) -> int:
        """Number of edges with both ends in ``X``."""
        xs = set(X)
        self.check_vertices(xs)
        if self.matrix_backed:
            idx = np.fromiter(xs, dtype=np.int64, count=len(xs))
            return int(self.matrix[np.ix_(idx, idx)].sum()) // 2
        return sum(len(self.adj[x] & xs) for x in xs) // 2

    def e_between(self, X: Iterable[int], Y: Iterable[int]) -> int:
        """Number of edges with one end in ``X`` and the other in ``Y``.

        Edges inside ``X & Y`` are counted once, matching the usual
        convention ``e(X, Y) = #{xy in E : x in X, y in Y}`` for disjoint sets.
        """
        xs, ys = set(X), set(Y)
        self.check_vertices(xs | ys)
        if self.matrix_backed and not xs & ys:
            xi = np.fromiter(xs, dtype=np.int64, count=len(xs))
            yi = np.fromiter(ys, dtype=np.int64, count=len(ys))
            return int(self.matrix[np.ix_(xi, yi)].sum())
        total = sum(len(self.adj[x] & ys) for x in xs)
        both = xs & ys
        return total - sum(len(self.adj[x] & both) for x in both) // 2

    def joint_neighbourhood(self, S: Iterable[int], X: Iterable[int] | None = None) -> frozenset[int]:
        """``N(S; X)``: common neighbours of all of ``S`` inside ``X``.

        The joint neighbourhood of the empty set is ``X`` (or all vertices).
        """
        S = list(S)
        self.check_vertices(S)
        out = set(range(self.n)) if X is None else set(X)
        for s in S:
            out &= self.adj[s]
        return frozenset(out)

    def neighbourhood(self, v: int, X: Iterable[int] | None = None) -> frozenset[int]:
        if X is None:
            return self.adj[v]
        return self.adj[v] & frozenset(X)

    def induced(self, S: Iterable[int]) -> "InducedSubgraph":
        """Induced subgraph on ``S`` with vertices relabelled ``0..|S|-1``.

        The relabelling keeps the relative order of ``S``.
        """
        verts = sorted(set(S))
        self.check_vertices(verts)
        index = {v: i for i, v in enumerate(verts)}
        edges = [(index[u], index[v]) for u in verts for v in self.adj[u] if v in index and u < v]
        return InducedSubgraph(Graph(len(verts), edges), tuple(verts), index)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(bfs_distances(self, 0)) == self.n

    def components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for s in range(self.n):
            if s in seen:
                continue
            comp = sorted(bfs_distances(self, s))
            seen.update(comp)
            comps.append(comp)
        return comps


@dataclass(frozen=True)
class InducedSubgraph:
    """An induced subgraph together with its label maps.

    ``old[i]`` is the parent-graph vertex carrying local label ``i``;
    ``new`` is the inverse map.
    """

    graph: Graph
    old: tuple[int, ...]
    new: dict[int, int] = field(repr=False)

    def to_parent(self, vs: Iterable[int]) -> list[int]:
        return [self.old[v] for v in vs]

    def to_local(self, vs: Iterable[int]) -> list[int]:
        return [self.new[v] for v in vs]


@dataclass(frozen=True)
class OrderedGraph:
    """A graph with a vertex order; ``order[i]`` is the vertex of rank ``i``."""

    graph: Graph
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(self.graph.n)):
            raise ValueError("order is not a permutation of the vertex set")
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))

    @cached_property
    def rank(self) -> tuple[int, ...]:
        r = [0] * self.graph.n
        for i, v in enumerate(self.order):
            r[v] = i
        return tuple(r)

    @property
    def n(self) -> int:
        return self.graph.n

    def left_neighbours(self, x: int) -> frozenset[int]:
        rx = self.rank[x]
        return frozenset(v for v in self.graph.adj[x] if self.rank[v] < rx)

    def left_degree(self, x: int) -> int:
        return len(self.left_neighbours(x))

    @cached_property
    def max_left_degree(self) -> int:
        return max((self.left_degree(x) for x in range(self.graph.n)), default=0)

    def is_degenerate(self, D: int) -> bool:
        return self.max_left_degree <= D

    def canonical(self) -> tuple["OrderedGraph", tuple[int, ...]]:
        """Relabel so that the order becomes ``0, 1, ..., n-1``.

        Returns the relabelled graph and the map ``new -> old``.
        """
        g = self.graph
        rank = self.rank
        edges = [(rank[u], rank[v]) for u, v in g.edges()]
        return OrderedGraph(Graph(g.n, edges), tuple(range(g.n))), self.order


def degeneracy_order(g: Graph) -> tuple[OrderedGraph, int]:
    """Minimum-degree peeling.

    Repeatedly removes a vertex of smallest remaining degree (lowest index on
    ties); the reversed removal sequence is a degeneracy order, and the largest
    degree seen at removal time is the degeneracy.
    """
    n = g.n
    if n == 0:
        return OrderedGraph(g, ()), 0
    deg = [len(a) for a in g.adj]
    buckets: list[set[int]] = [set() for _ in range(max(deg) + 1)]
    for v, d in enumerate(deg):
        buckets[d].add(v)
    removed = [False] * n
    removal = []
    degeneracy = 0
    low = 0
    for _ in range(n):
        while not buckets[low]:
            low += 1
        v = min(buckets[low])
        buckets[low].remove(v)
        degeneracy = max(degeneracy, low)
        removed[v] = True
        removal.append(v)
        for u in g.adj[v]:
            if not removed[u]:
                buckets[deg[u]].remove(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
                low = min(low, deg[u])
    return OrderedGraph(g, tuple(reversed(removal))), degeneracy


def bfs_distances(g: Graph, source: int, allowed: Iterable[int] | None = None) -> dict[int, int]:
    allowed_set = None if allowed is None else set(allowed)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if v not in dist and (allowed_set is None or v in allowed_set):
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_distance(g: Graph, x: int, y: int) -> float:
    g.check_vertices((x, y))
    return bfs_distances(g, x).get(y, INF)


def left_distance(og: OrderedGraph, y: int, x: int) -> float:
    """Length of a shortest path from ``y`` down to ``x`` along which ranks
    strictly decrease; ``INF`` if there is none."""
    og.graph.check_vertices((x, y))
    rank = og.rank
    if rank[x] > rank[y]:
        raise ValueError("x must not come after y in the order")
    return left_distances_from(og, y).get(x, INF)


def left_distances_from(og: OrderedGraph, y: int, limit: float = INF) -> dict[int, int]:
    """All finite left distances from ``y`` (up to ``limit``)."""
    rank = og.rank
    adj = og.graph.adj
    dist = {y: 0}
    frontier = [y]
    d = 0
    # Ranks strictly decrease along the path, so a BFS over "descending" arcs
    # gives shortest descending paths.
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


def power_graph(g: Graph, ell: int) -> Graph:
    """Graph on the same vertices joining pairs at distance ``1..ell``."""
    if ell < 1:
        raise ValueError("power must be at least 1")
    edges = []
    for u in range(g.n):
        dist = _bounded_bfs(g, u, ell)
        edges.extend((u, v) for v in dist if v > u)
    return Graph(g.n, edges)


def _bounded_bfs(g: Graph, source: int, limit: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if dist[u] == limit:
            continue
        for v in g.adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def disjoint_union(*graphs: Graph) -> tuple[Graph, list[list[int]]]:
    """Disjoint union; also returns the vertex blocks of each input."""
    edges = []
    blocks = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        blocks.append(list(range(offset, offset + h.n)))
        offset += h.n
    return Graph(offset, edges), blocks


# -- small named graphs used in tests and demos ------------------------------

def complete_graph(n: int) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """``K_{1,leaves}`` with centre 0."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


# -- edge colourings ----------------------------------------------------------

class EdgeColouring:
    """Total map from the edges of ``graph`` to colours ``0..r-1``.

    Stored as an ``int8`` label matrix with ``-1`` off the edge set.
    """

    def __init__(self, graph: Graph, r: int, colours: dict[tuple[int, int], int]):
        if r < 1:
            raise ValueError("need at least one colour")
        labels = np.full((graph.n, graph.n), -1, dtype=np.int8)
        for (u, v), c in colours.items():
            if not graph.has_edge(u, v):
                raise ValueError(f"{(min(u, v), max(u, v))} is not an edge")
            if not 0 <= c < r:
                raise ValueError(f"colour {c} out of range for r={r}")
            labels[u, v] = labels[v, u] = c
        self._init(graph, r, labels)

    def _init(self, graph: Graph, r: int, labels: np.ndarray) -> None:
        if r > 127:
            raise ValueError("at most 127 colours")
        if not np.array_equal(labels >= 0, graph.matrix):
            raise ValueError("colouring is not total")
        labels.setflags(write=False)
        self.graph = graph
        self.r = r
        self.labels = labels

    @classmethod
    def from_labels(cls, graph: Graph, r: int, labels: np.ndarray) -> "EdgeColouring":
        """``labels[u, v]`` is the colour of edge ``uv`` and ``-1`` elsewhere."""
        labels = np.asarray(labels, dtype=np.int8).copy()
        if not np.array_equal(labels, labels.T):
            raise ValueError("label matrix is not symmetric")
        if labels.max(initial=-1) >= r or labels.min(initial=-1) < -1:
            raise ValueError(f"labels out of range for r={r}")
        out = cls.__new__(cls)
        out._init(graph, r, labels)
        return out

    @property
    def colours(self) -> dict[tuple[int, int], int]:
        us, vs = np.nonzero(np.triu(self.labels >= 0, 1))
        return {(u, v): int(self.labels[u, v]) for u, v in zip(us.tolist(), vs.tolist())}

    def colour(self, u: int, v: int) -> int:
        c = int(self.labels[u, v])
        if c < 0:
            raise KeyError((u, v))
        return c

    def class_graph(self, c: int) -> Graph:
        return self.class_graphs[c]

    @cached_property
    def class_graphs(self) -> tuple[Graph, ...]:
        return tuple(Graph.from_matrix(self.labels == c) for c in range(self.r))


# -- edge-list text format -----------------------------------------------------

def format_edge_list(g: Graph, order: Sequence[int] | None = None) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    if order is not None:
        lines.append("order: " + " ".join(str(v) for v in order))
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[Graph, tuple[int, ...] | None]:
    """Parse the edge-list format; returns the graph and the order if present."""
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty edge list")
    n, m = (int(t) for t in rows[0].split())
    order = None
    edges = []
    for ln in rows[1:]:
        if ln.startswith("order:"):
            order = tuple(int(t) for t in ln[len("order:"):].split())
            continue
        u, v = ln.split()[:2]
        edges.append((int(u), int(v)))
    if len(edges) != m:
        raise ValueError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, edges), order


def read_graph(path) -> Graph:
    with open(path) as fh:
        return parse_edge_list(fh.read())[0]


def read_ordered_graph(path) -> OrderedGraph:
    with open(path) as fh:
        g, order = parse_edge_list(fh.read())
    if order is None:
        return degeneracy_order(g)[0]
    return OrderedGraph(g, order)


def write_graph(path, g: Graph, order: Sequence[int] | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g, order))


def format_colouring(c: EdgeColouring) -> str:
    """First line ``n r m``, then one ``u v colour`` line per edge."""
    us, vs = np.nonzero(np.triu(c.labels >= 0, 1))
    lines = [f"{c.graph.n} {c.r} {len(us)}"]
    lines.extend(f"{u} {v} {int(c.labels[u, v])}" for u, v in zip(us.tolist(), vs.tolist()))
    return "\n".join(lines) + "\n"


def parse_colouring(text: str) -> EdgeColouring:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise ValueError("empty colouring")
    n, r, m = (int(t) for t in rows[0])
    data = np.array([[int(t) for t in row[:3]] for row in rows[1:]], dtype=np.int64).reshape(-1, 3)
    if len(data) != m:
        raise ValueError(f"header announces {m} edges, found {len(data)}")
    a = np.zeros((n, n), dtype=bool)
    labels = np.full((n, n), -1, dtype=np.int8)
    if m:
        a[data[:, 0], data[:, 1]] = a[data[:, 1], data[:, 0]] = True
        labels[data[:, 0], data[:, 1]] = labels[data[:, 1], data[:, 0]] = data[:, 2]
    return EdgeColouring.from_labels(Graph.from_matrix(a), r, labels)


def read_colouring(path) -> EdgeColouring:
    with open(path) as fh:
        return parse_colouring(fh.read())


def write_colouring(path, c: EdgeColouring) -> None:
    with open(path, "w") as fh:
        fh.write(format_colouring(c))
