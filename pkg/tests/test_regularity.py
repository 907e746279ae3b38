from fractions import Fraction
from itertools import product

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import energy_ref, nx_graph, partite_ref, regular_pair_ref

from sparse_ramsey.ensemble import EnsembleSpec, sample_gnp
from sparse_ramsey.experiments import colour_edges
from sparse_ramsey.graph import Graph, complete_graph, cycle_graph, path_graph
from sparse_ramsey.regularity import (
    IterationBudgetExceeded,
    NoMonochromaticClique,
    Partition,
    as_fraction,
    assess_pair,
    count_noncompletion_embeddings,
    count_partite_embeddings,
    count_poor_embeddings,
    defect_cauchy_schwarz,
    density_deviations,
    energy,
    equalize,
    moved_vertices,
    p_density,
    predicted_partite_count,
    select_colour_and_parts,
    srl_partition,
    strengthened_srl,
)
from sparse_ramsey.regularity.srl import block_edge_counts


def random_graph(rng, n, p):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def planted(n, k, seed, lo=0.2, hi=0.8):
    label = np.arange(n) // (n // k)
    rng = np.random.default_rng(seed)
    dens = rng.choice([lo, hi], size=(k, k))
    dens = np.triu(dens, 1)
    dens = dens + dens.T
    A = np.triu(rng.random((n, n)) < dens[label][:, label], 1)
    return Graph.from_matrix(A | A.T)


# -- partitions ------------------------------------------------------------------

def test_equipartition_and_refinement():
    P = Partition.equipartition(10, 3)
    assert P.sizes == (4, 3, 3) and P.is_equitable
    Q = P.split_each(2)
    assert len(Q) == 6 and Q.refines(P) and Q.is_equitable_refinement_of(P)
    assert Q.parent_map(P) == [0, 0, 1, 1, 2, 2]
    assert list(P.block_index(10)) == [0] * 4 + [1] * 3 + [2] * 3
    with pytest.raises(ValueError):
        Partition([(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        P.parent_map(Partition.equipartition(9, 3))


@given(st.lists(st.integers(0, 12), min_size=1, max_size=6))
def test_equalize_moves_only_the_surplus(sizes):
    blocks, start = [], 0
    for s in sizes:
        blocks.append(tuple(range(start, start + s)))
        start += s
    P = Partition(blocks)
    E = equalize(P)
    assert E.is_equitable and E.ground == P.ground
    k, total = len(sizes), sum(sizes)
    base, extra = divmod(total, k)
    # the largest blocks keep the spare slots, so only the excess moves
    targets = sorted(sizes, reverse=True)
    need = sum(max(0, s - (base + (1 if i < extra else 0))) for i, s in enumerate(targets))
    assert moved_vertices(P, E) == need


# -- pairs -----------------------------------------------------------------------

def test_as_fraction():
    assert as_fraction(0.15) == Fraction(3, 20)
    assert as_fraction(3) == 3
    assert as_fraction(Fraction(1, 7)) == Fraction(1, 7)


def test_p_density():
    g = complete_graph(4)
    assert p_density(g, [0], [1, 2], Fraction(1, 2)) == 2
    with pytest.raises(ValueError):
        p_density(g, [0], [0], 1)
    with pytest.raises(ValueError):
        p_density(g, [], [1], 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_exhaustive_assessment_matches_reference(seed):
    rng = np.random.default_rng(seed)
    a, b = int(rng.integers(1, 6)), int(rng.integers(1, 6))
    g = random_graph(rng, a + b, float(rng.uniform(0.2, 0.8)))
    U, V = list(range(a)), list(range(a, a + b))
    eps = Fraction(int(rng.integers(1, 5)), 10)
    p = Fraction(1, 2)
    res = assess_pair(g, U, V, eps, p, mode="exhaustive")
    assert res.regular == regular_pair_ref(nx_graph(g.n, g.edges()), U, V, eps, p)
    if not res.regular:
        X, Y = res.witness
        assert len(X) >= eps * a and len(Y) >= eps * b
        assert abs(p_density(g, X, Y, p) - res.density) > eps


def test_assessment_modes():
    g = sample_gnp(EnsembleSpec(400, 0.5, 1))
    U, V = range(200), range(200, 400)
    cert = assess_pair(g, U, V, 0.5, 0.5, mode="certified")
    assert cert.regular and cert.mode == "certified"
    # a half-empty pair is caught by sampling with the spectral candidates
    A = g.matrix.copy()
    A[:100, 200:300] = False
    A[200:300, :100] = False
    h = Graph.from_matrix(A)
    res = assess_pair(h, U, V, 0.3, 0.5, mode="sampled", spectral=True)
    assert not res.regular
    X, Y = res.witness
    assert abs(p_density(h, X, Y, 0.5) - res.density) > Fraction(3, 10)
    with pytest.raises(ValueError):
        assess_pair(g, range(20), range(20, 40), 0.3, 0.5, mode="exhaustive")
    with pytest.raises(ValueError):
        assess_pair(g, U, V, 0.3, 0.5, mode="bogus")


# -- energy ----------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_energy_matches_reference(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 16))
    graphs = [random_graph(rng, n, 0.5) for _ in range(2)]
    labels = rng.integers(0, int(rng.integers(1, 5)), size=n)
    blocks = [tuple(np.flatnonzero(labels == c).tolist()) for c in np.unique(labels)]
    P = Partition(blocks)
    p = Fraction(1, 3)
    assert energy(P, graphs, p) == energy_ref([nx_graph(n, g.edges()) for g in graphs], blocks, p, n)
    c = block_edge_counts(P, graphs[0])
    for i, U in enumerate(blocks):
        for j, V in enumerate(blocks):
            if i != j:
                assert c[i, j] == graphs[0].e_between(U, V)


def test_defect_cauchy_schwarz_validation():
    lhs, rhs = defect_cauchy_schwarz([Fraction(1, 2)] * 2, 1, [1, -1])
    assert lhs == rhs == 2
    with pytest.raises(ValueError):
        defect_cauchy_schwarz([1, 1], 1, [0, 0])
    with pytest.raises(ValueError):
        defect_cauchy_schwarz([Fraction(1, 2)] * 2, 1, [1, 0])
    with pytest.raises(ValueError):
        defect_cauchy_schwarz([2, -1], 1, [0, 0])


# -- regular partitions ------------------------------------------------------------

def test_srl_partition_on_planted_blocks():
    g = planted(400, 4, 0)
    P = srl_partition([g], 0.3, 4, 0.5)
    assert P.is_equitable and P.ground == frozenset(range(400))


def test_strengthened_srl_planted():
    g = planted(800, 8, 1)
    dec = strengthened_srl([g], Fraction(1, 2), lambda k: Fraction(1, 2), 2, 0.5, seed=0)
    assert dec.fine.refines(dec.coarse)
    limit = dec.eps * len(dec.fine) ** 2
    assert all(d <= limit for d in density_deviations(dec.coarse, dec.fine, [g], dec.p, dec.eps))
    tr = dec.energy_trace
    assert all(b > a for a, b in zip(tr, tr[1:]))
    js = dec.to_json()
    assert len(js["fine"]) == len(dec.fine)


def test_strengthened_srl_budget():
    g = sample_gnp(EnsembleSpec(200, 0.1, 0))
    with pytest.raises(IterationBudgetExceeded) as info:
        strengthened_srl([g], Fraction(1, 20), lambda k: Fraction(1, 20), 4, 0.1, max_iterations=1,
                         srl_budget=0, max_parts=8)
    assert isinstance(info.value.energy_trace, list)


# -- counting ----------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_partite_count_matches_reference(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 12))
    g = random_graph(rng, n, 0.5)
    k = int(rng.integers(1, 5))
    H = random_graph(rng, k, 0.7)
    parts = [tuple(int(v) for v in rng.choice(n, size=int(rng.integers(1, 5)), replace=False)) for _ in range(k)]
    assert count_partite_embeddings(g, H, parts) == partite_ref(nx_graph(n, g.edges()), nx_graph(k, H.edges()), parts)


def partite_maps(g, H, parts, vertices):
    for images in product(*[parts[x] for x in vertices]):
        if len(set(images)) < len(images):
            continue
        phi = dict(zip(vertices, images))
        if all(g.has_edge(phi[u], phi[v]) for u, v in H.edges() if u in phi and v in phi):
            yield phi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_poor_and_noncompletion_counts(seed):
    rng = np.random.default_rng(seed)
    n = 12
    g = random_graph(rng, n, 0.5)
    parts = [tuple(range(3 * i, 3 * i + 3)) for i in range(4)]
    H = cycle_graph(4)
    d, p = 0.9, 0.5
    y = 3
    thr = 0.75 * (d * p) ** 2 * 3
    poor = sum(1 for phi in partite_maps(g, H, parts, [0, 1, 2])
               if sum(1 for w in parts[y] if w not in phi.values()
                      and all(g.has_edge(phi[u], w) for u in H.adj[y])) < thr)
    # the count uses all of V_y, images of other vertices included
    poor_all = sum(1 for phi in partite_maps(g, H, parts, [0, 1, 2])
                   if sum(1 for w in parts[y] if all(g.has_edge(phi[u], w) for u in H.adj[y])) < thr)
    assert count_poor_embeddings(g, H, parts, d, p, y=y) == poor_all
    assert poor >= poor_all
    Q = [2, 3]
    bad = sum(1 for phi in partite_maps(g, H, parts, [0, 1])
              if not any(True for _ in partite_maps(g, H, parts, [0, 1, 2, 3])
                         if _[0] == phi[0] and _[1] == phi[1]))
    assert count_noncompletion_embeddings(g, H, Q, parts) == bad


def test_counting_limits():
    with pytest.raises(ValueError):
        count_partite_embeddings(complete_graph(4), path_graph(9), [[0]] * 9)
    with pytest.raises(ValueError):
        count_partite_embeddings(complete_graph(4), path_graph(2), [[0]])
    assert count_partite_embeddings(complete_graph(4), Graph(0), []) == 1
    assert predicted_partite_count([10, 10], {(0, 1): 0.5}, 0.2) == pytest.approx(10.0)


# -- selection ---------------------------------------------------------------------

@pytest.fixture(scope="module")
def two_colour_decomposition():
    g = sample_gnp(EnsembleSpec(800, 0.3, 1))
    c = colour_edges(g, "random", 2, 1)
    graphs = list(c.class_graphs)
    dec = strengthened_srl(graphs, 0.3, lambda k: 0.3, 4, 0.3, fine_split=2, seed=1)
    return graphs, dec


def test_selection_basic(two_colour_decomposition):
    graphs, dec = two_colour_decomposition
    sel = select_colour_and_parts(dec, graphs, 2, 3)
    assert sel.colour in (0, 1) and len(sel.parts) == 3
    assert len({len(P) for P in sel.parts}) == 1
    used = [v for P in sel.parts for v in P]
    assert len(used) == len(set(used))
    for X, Y in sel.coarse_density:
        assert sel.coarse_density[(X, Y)] >= Fraction(1, 4)


def test_selection_avoids_Z_and_fixes_colour(two_colour_decomposition):
    graphs, dec = two_colour_decomposition
    Z = list(range(0, 800, 40))
    sel = select_colour_and_parts(dec, graphs, 2, 3, Z=Z, colour=1)
    assert sel.colour == 1
    assert not sel.used_vertices() & set(Z)
    with pytest.raises(NoMonochromaticClique):
        select_colour_and_parts(dec, graphs, 2, len(dec.coarse) + 1)
    with pytest.raises(ValueError):
        select_colour_and_parts(dec, graphs[:1], 2, 3)
