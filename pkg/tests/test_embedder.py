from fractions import Fraction
from itertools import permutations, product

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import distance_classes_ok, nx_graph, spencer_ref

from sparse_ramsey.density import RootedPattern, spencer_density
from sparse_ramsey.embedder import (
    ConstantsPack,
    EmbeddingInstance,
    InfeasibleConstants,
    RebalancingBudgetExceeded,
    RegularityConfig,
    build_lookahead,
    build_segment_lookahead,
    candidate_set,
    cn_injectivize,
    complete_segment,
    cross_off,
    embed_monochromatic,
    enumerate_extensions,
    fill_schedule,
    find_k4,
    grow_homomorphism,
    hajnal_szemeredi_partition,
    is_completable,
    is_promising,
    level_partition,
    lookahead_budget,
    paper_sizes,
    segment_length,
    shortest_cycle,
    verify_distance_partition,
    verify_embedding,
)
from sparse_ramsey.embedder.extensions import promise_count
from sparse_ramsey.ensemble import EnsembleSpec, sample_gnp
from sparse_ramsey.experiments import colour_edges, generate_target
from sparse_ramsey.graph import (
    EdgeColouring,
    Graph,
    OrderedGraph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    left_distances_from,
    path_graph,
)


def small_pack(**kw):
    base = dict(d=Fraction(1, 2), l1=2)
    base.update(kw)
    return ConstantsPack.practical(2, 3, 2, Fraction(1, 2), **base)


# -- constants ---------------------------------------------------------------------

def test_practical_pack_and_json():
    cp = ConstantsPack.practical(2, 4, 2, 0.3)
    assert cp.d == Fraction(1, 4) and cp.h1 == 5 and cp.mode == "practical"
    assert cp.L == 2 * 4**cp.l1 * cp.h1
    back = ConstantsPack.from_json(cp.to_json())
    assert back == cp


def test_pack_validation():
    with pytest.raises(ValueError):
        ConstantsPack.practical(2, 4, 2, 0.3, h1=3)
    with pytest.raises(ValueError):
        ConstantsPack.practical(2, 4, 2, 0.3, d=1)
    with pytest.raises(ValueError):
        ConstantsPack.practical(5, 4, 2, 0.3)
    with pytest.raises(ValueError):
        ConstantsPack.practical(2, 4, 2, 0)


def test_paper_sizes():
    with pytest.raises(InfeasibleConstants):
        paper_sizes(2, 3, Fraction(2, 3))
    with pytest.raises(InfeasibleConstants):
        paper_sizes(2, 3, 0.3)
    # D = 1 and mu = 1 is the one regime small enough to materialise
    assert paper_sizes(1, 2, 1) == (16, 276, 2 * 2**276)
    cp = ConstantsPack.paper(1, 2, 2, 1, 10, 10)
    assert cp.mode == "paper" and cp.hsz_distance == cp.l1 == 276


# -- distance partitions ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 2))
def test_hsz_partition(seed, ell):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 40))
    g = nx.random_regular_graph(3, n if n % 2 == 0 and n > 3 else n + 1, seed=seed) if n > 3 else nx.empty_graph(n)
    G = Graph(g.number_of_nodes(), g.edges)
    P = hajnal_szemeredi_partition(G, 3, ell)
    assert len(P) == 2 * 3**ell
    assert distance_classes_ok(g, [list(b) for b in P.blocks], ell)
    assert verify_distance_partition(G, P.blocks, ell) == []


def test_hsz_errors():
    with pytest.raises(ValueError):
        hajnal_szemeredi_partition(complete_graph(5), 3, 1)
    with pytest.raises(RebalancingBudgetExceeded):
        hajnal_szemeredi_partition(complete_graph(4), 3, 1, h=3)
    assert verify_distance_partition(path_graph(3), [[0, 1], [2]], 1)


# -- lookaheads --------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_lookahead_invariants(seed):
    og = generate_target(2, 4, 20, seed)
    cp = ConstantsPack.practical(2, 4, 2, Fraction(1, 2), h0=20)
    for y in og.order[1:]:
        ctx = build_lookahead(og, y, cp)
        dist = left_distances_from(og, y, cp.l1)
        assert ctx.h1 == {v for v in dist if v != y}
        assert ctx.boundary == {v for v, d in dist.items() if d == cp.l1}
        assert ctx.seeds == og.left_neighbours(y) <= ctx.core <= ctx.h1
        sub = og.graph.induced(ctx.h1)
        if len(ctx.h1) > len(ctx.core):
            local = frozenset(sub.to_local(sorted(ctx.core)))
            ref = spencer_ref(nx_graph(sub.graph.n, sub.graph.edges()), local) if sub.graph.n <= 12 else \
                spencer_density(RootedPattern(sub.graph, local), method="flow").value
            assert ref <= cp.D + cp.mu


def test_segment_lookahead():
    g = cycle_graph(8)
    og = OrderedGraph(g, (4, 3, 5, 2, 6, 7, 0, 1))
    cp = small_pack()
    ctx = build_segment_lookahead(og, (7, 0, 1), cp)
    assert ctx.segment_kind == "path" and ctx.seeds == {6, 2}
    assert not ctx.h1 & {7, 0, 1}
    with pytest.raises(ValueError):
        build_segment_lookahead(og, (6, 7, 0), cp)


# -- tiny instance -------------------------------------------------------------------

def tiny_instance(seed, n_host=15):
    F = Graph(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)])
    og = OrderedGraph(F, tuple(range(5)))
    rng = np.random.default_rng(seed)
    host = Graph(n_host, [(u, v) for u in range(n_host) for v in range(u + 1, n_host) if rng.random() < 0.8])
    G = colour_edges(host, "random", 2, seed).class_graph(0)
    perm = rng.permutation(n_host)
    parts = [perm[3 * i:3 * i + 3].tolist() for i in range(4)]
    phi = [0, 1, 2, 3, 0]
    return EmbeddingInstance(host, G, parts, phi, og, small_pack(), 0.8)


def brute_extensions(inst, psi, target):
    ctx = inst.context(target)
    F = inst.og.graph
    images = {v: psi[v] for v in ctx.h1 if v in psi}
    free = sorted(v for v in ctx.h1 if v not in images)
    avail = [w for w in range(inst.N) if w not in images.values()]
    y = ctx.target
    nb = inst.og.left_neighbours(y)
    part = inst.parts[inst.phi[y]]
    tot = bad = 0
    for imgs in permutations(avail, len(free)):
        full = dict(images)
        full.update(zip(free, imgs))
        if any(v in ctx.core and full[v] not in set(inst.parts[inst.phi[v]].tolist()) for v in free):
            continue
        ok = True
        for u, w in F.edges():
            if u in ctx.h1 and w in ctx.h1 and (u in free or w in free):
                M = inst.A if (u in ctx.core and w in ctx.core) else inst.B
                if not M[full[u], full[w]]:
                    ok = False
                    break
        if not ok:
            continue
        tot += 1
        common = sum(1 for w in part if all(inst.A[full[a], w] for a in nb))
        bad += common < inst.promise_threshold(y)
    return tot, bad


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_enumerate_extensions_matches_brute_force(seed):
    inst = tiny_instance(seed)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, 4))
    psi = {x: int(rng.choice(inst.parts[inst.phi[x]])) for x in range(k)}
    for y in (3, 4):
        assert enumerate_extensions(inst, psi, y) == brute_extensions(inst, psi, y)


def test_candidates_and_cross_off():
    inst = tiny_instance(3)
    psi = {0: int(inst.parts[0][0])}
    W1 = candidate_set(inst, psi, 1)
    assert set(W1.tolist()) == {w for w in inst.parts[1].tolist() if inst.A[psi[0], w]}
    for method in ("estimate", "exact"):
        W, C, deferred = cross_off(inst, psi, 1, W1, method=method)
        assert set(W.tolist()) <= set(W1.tolist())
        for crossed in C.values():
            assert not set(crossed.tolist()) & set(W.tolist())
    v, e, thr = lookahead_budget(inst, 4, 2)
    assert v == 1 and e == 1
    assert thr == pytest.approx(float(inst.cp.kappa) ** 2 * inst.N * 0.8)


def test_grow_homomorphism_respects_parts():
    host = sample_gnp(EnsembleSpec(300, 0.5, 0))
    G = colour_edges(host, "random", 2, 0).class_graph(1)
    og = generate_target(2, 4, 12, 0)
    cp = ConstantsPack.practical(2, 4, 2, Fraction(1, 2))
    classes = hajnal_szemeredi_partition(og.graph, 4, 1, cp.h1).blocks
    phi = [next(i for i, c in enumerate(classes) if v in c) for v in range(og.n)]
    parts = [list(range(50 * i, 50 * i + 50)) for i in range(cp.h1)]
    inst = EmbeddingInstance(host, G, parts, phi, og, cp, 0.5)
    state = grow_homomorphism(inst, "lowest", audit=True)
    assert state.success, state.failure
    psi = state.psi
    assert set(psi) == set(range(og.n))
    for u, v in og.graph.edges():
        assert G.has_edge(psi[u], psi[v])
    for x, w in psi.items():
        assert w in parts[phi[x]]
    assert len(state.trajectory()["W_sizes"]) == og.n


def test_promise_and_completion():
    G = complete_graph(6)
    A = G.matrix
    assert promise_count(A, np.array([3, 4, 5]), [0, 1]) == 3
    F = cycle_graph(4)
    allowed = np.ones(6, dtype=bool)
    allowed[[0, 1]] = False
    done = complete_segment(A, F, [2, 3], {0: 0, 1: 1}, allowed)
    assert done is not None and set(done.values()) <= {2, 3, 4, 5}
    allowed[:] = False
    assert complete_segment(A, F, [2, 3], {0: 0, 1: 1}, allowed) is None
    with pytest.raises(ValueError):
        complete_segment(A, F, [2, 3], {0: 0}, allowed)


def test_is_promising_and_completable():
    og = OrderedGraph(cycle_graph(6), (0, 1, 2, 3, 4, 5))
    cp = small_pack()
    G = complete_graph(12)
    parts = [range(3 * i, 3 * i + 3) for i in range(2)] + [range(6, 7), range(7, 8)]
    ctx = build_lookahead(og, 2, cp)
    assert is_promising(G, parts, [0, 1, 2, 3, 0, 1], ctx, {1: 3}, Fraction(1, 2), 1.0, 1, 3)
    with pytest.raises(ValueError):
        is_promising(G, parts, [0, 1, 2, 3, 0, 1], ctx, {}, Fraction(1, 2), 1.0, 1, 3)
    seg = build_segment_lookahead(og, (4, 5), cp)
    # the segment goes outside every part
    ok, found = is_completable(G, parts, og.graph, seg, {0: 0, 3: 3}, witness=True)
    assert ok and set(found) == {4, 5} and {found[4], found[5]} <= set(range(8, 12))
    assert not is_completable(G, parts, og.graph, seg, {0: 0, 3: 3}, Z=range(8, 11))


# -- CN -----------------------------------------------------------------------

def test_level_partition():
    rng = np.random.default_rng(0)
    levels = level_partition(1000, rng)
    assert len(levels) == 7 and len(levels[0]) == 500
    assert sorted(np.concatenate(levels).tolist()) == list(range(1000))
    assert len(level_partition(1, rng)) == 1


def test_fill_schedule():
    k = fill_schedule([500, 84, 84], 10, 1000, 0.5, 0.1, 2, 3)
    assert k[0] == 10
    assert k[1] == pytest.approx(16 * 2 * 3 * 2 / (0.5 * 0.01 * 500) * 10)


def test_cn_injectivize():
    N = 400
    res = cn_injectivize(N, list(range(30)), lambda psi, x: np.arange(N), 0.5, 2, 0.5, 3, seed=1)
    assert res.success and len(set(res.psi.values())) == 30
    assert res.schedule_respected and set(res.levels.values()) == {0}
    # a tiny oracle forces later levels and eventually fails
    res = cn_injectivize(N, list(range(5)), lambda psi, x: np.array([7, 8]), 0.5, 2, 0.5, 3,
                         seed=1, left_degree=lambda x: 1, policy="lowest")
    assert not res.success and res.failed_at == 2
    assert res.p2_violations and res.to_json()["failed_at"] == 2


# -- pipeline -----------------------------------------------------------------------

def test_small_helpers():
    assert segment_length(Fraction(1, 3)) == 6
    assert segment_length(0.9) == 4
    for g in (cycle_graph(7), complete_graph(4), disjoint_union(cycle_graph(5), cycle_graph(3))[0]):
        cyc = shortest_cycle(g)
        ref = nx_graph(g.n, g.edges())
        assert len(cyc) == nx.girth(ref)
        assert all(ref.has_edge(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))
    assert shortest_cycle(path_graph(5)) is None
    forbidden = np.zeros(6, dtype=bool)
    forbidden[0] = True
    k4 = find_k4(complete_graph(6), forbidden, np.random.default_rng(0))
    assert len(set(k4)) == 4 and 0 not in k4
    assert find_k4(cycle_graph(6), np.zeros(6, dtype=bool), np.random.default_rng(0)) is None


def test_verify_embedding():
    g = complete_graph(4)
    c = EdgeColouring(g, 2, {e: int(e == (0, 1)) for e in g.edges()})
    F = path_graph(3)
    assert verify_embedding(F, c, 0, [(0, 1), (1, 2), (2, 3)]) == []
    assert verify_embedding(F, c, 0, [(0, 0), (1, 1), (2, 2)])
    assert verify_embedding(F, c, 0, [(0, 1), (1, 1), (2, 3)])


@pytest.fixture(scope="module")
def coloured_host():
    host = sample_gnp(EnsembleSpec(1200, 0.3, 4))
    return host, colour_edges(host, "random", 2, 4)


SMALL_REG = RegularityConfig(eps=0.3, k0=6, fine_split=2)


def test_embed_degenerate_end_to_end(coloured_host):
    host, c = coloured_host
    F = generate_target(2, 4, 15, 1).graph
    cp = ConstantsPack.practical(2, 4, 2, Fraction(1, 4))
    rep = embed_monochromatic(F, host, c, cp, 0.3, seed=1, regularity=SMALL_REG)
    assert rep.success, (rep.stage, rep.error)
    assert verify_embedding(F, c, rep.colour, rep.embedding) == []
    assert rep.to_json()["embedding"]


def test_embed_reports_setup_failures(coloured_host):
    host, c = coloured_host
    cp = ConstantsPack.practical(2, 4, 2, Fraction(1, 4))
    rep = embed_monochromatic(complete_graph(6), host, c, cp, 0.3, regularity=SMALL_REG)
    assert not rep.success and rep.stage == "setup"
    rep = embed_monochromatic(Graph(3), host, c, cp, 0.3)
    assert rep.success
    with pytest.raises(ValueError):
        embed_monochromatic(path_graph(3), host, c, cp, 0.3, mode="bogus")
