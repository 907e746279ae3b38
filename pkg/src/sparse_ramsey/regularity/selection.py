"""Choosing a colour and well-behaved parts from a coarse/fine decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from ..graph import Graph
from .pairs import as_fraction
from .partition import Partition
from .srl import RegularityDecomposition, block_edge_counts


class NoMonochromaticClique(RuntimeError):
    def __init__(self, message: str, reduced: dict):
        super().__init__(message)
        self.reduced = reduced


@dataclass
class PartSelection:
    colour: int
    coarse_indices: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    fine: tuple[tuple[tuple[int, ...], ...], ...]
    reserve: tuple[tuple[tuple[int, ...], ...], ...]
    rule: str
    bad_coarse_pairs: list[tuple[int, int]] = field(default_factory=list)
    bad_fine_parts: dict[int, list[int]] = field(default_factory=dict)
    coarse_density: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    @property
    def part_size(self) -> int:
        return len(self.parts[0]) if self.parts else 0

    def used_vertices(self) -> set[int]:
        return {v for part in self.parts for v in part}


def _coarse_densities(decomp: RegularityDecomposition, graphs: Sequence[Graph]):
    p = decomp.p
    cs = decomp.coarse.sizes
    dens = {}
    for c, g in enumerate(graphs):
        counts = block_edge_counts(decomp.coarse, g)
        for i, j in combinations(range(len(cs)), 2):
            dens[(i, j, c)] = Fraction(int(counts[i, j])) / (p * cs[i] * cs[j])
    return dens


def _fine_quality(decomp: RegularityDecomposition, graphs: Sequence[Graph]):
    """Exact fine-pair densities per colour plus the regularity flags from the table."""
    p = decomp.p
    fs = decomp.fine.sizes
    dens = {}
    for c, g in enumerate(graphs):
        counts = block_edge_counts(decomp.fine, g)
        for a, b in combinations(range(len(fs)), 2):
            dens[(a, b, c)] = Fraction(int(counts[a, b])) / (p * fs[a] * fs[b])
    regular = {key: a.regular for key, a in decomp.pairs.items()}
    return dens, regular


def select_colour_and_parts(decomp: RegularityDecomposition, graphs: Sequence[Graph], r: int, h1: int,
                            Z: Iterable[int] = (), d=None, *, bad_pair_fraction=None,
                            bad_part_fraction=None, z_fraction=Fraction(1, 20),
                            keep_fraction=Fraction(9, 10), reserve: bool = False,
                            allow_heavy: bool = True, colour: int | None = None) -> PartSelection:
    """Bad-pair marking, a bad-pair-free set of coarse parts, a colour with an
    ``h1``-clique of dense pairs, then fine-part filtering and trimming.

    ``reserve=True`` keeps half of the good fine parts of every chosen coarse
    part out of ``parts`` (returned as ``reserve``) for later completions.
    ``colour`` restricts the search to one colour.
    """
    if len(graphs) != r:
        raise ValueError("need one graph per colour")
    eps = decomp.eps
    d = Fraction(1, 2 * r) if d is None else as_fraction(d)
    bad_pair_fraction = as_fraction(bad_pair_fraction) if bad_pair_fraction is not None else Fraction(math.sqrt(eps))
    bad_part_fraction = as_fraction(bad_part_fraction) if bad_part_fraction is not None else Fraction(eps ** 0.25)
    Z = set(Z)
    coarse, fine = decomp.coarse, decomp.fine
    kc = len(coarse)
    parent = decomp.fine_parent
    children: dict[int, list[int]] = {i: [] for i in range(kc)}
    for a, X in enumerate(parent):
        children[X].append(a)
    fdens, freg = _fine_quality(decomp, graphs)
    cdens = _coarse_densities(decomp, graphs)

    def fine_key(a, b, c):
        return (a, b, c) if a < b else (b, a, c)

    # 1. bad coarse pairs
    bad_pairs = []
    for X, Y in combinations(range(kc), 2):
        sub = [(a, b) for a in children[X] for b in children[Y]]
        for c in range(r):
            off = 0
            for a, b in sub:
                key = fine_key(a, b, c)
                if not freg.get(key, True) or abs(fdens[key] - cdens[(X, Y, c)]) > eps:
                    off += 1
            if off > bad_pair_fraction * len(sub):
                bad_pairs.append((X, Y))
                break

    # 2. largest set of coarse parts spanning no bad pair
    clean = nx.complete_graph(kc)
    clean.remove_edges_from(bad_pairs)
    S, _ = nx.max_weight_clique(clean, weight=None)
    S = sorted(S)

    # 3. colour with an h1-clique of dense pairs
    def colour_graph(c: int, rule: str) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(S)
        for X, Y in combinations(S, 2):
            ds = [cdens[(X, Y, k)] for k in range(r)]
            if rule == "majority":
                ok = max(range(r), key=lambda k: (ds[k], -k)) == c and ds[c] >= d
            else:
                ok = ds[c] >= Fraction(3, 4 * r)
            if ok:
                h.add_edge(X, Y)
        return h

    chosen = None
    for rule in ("majority", "heavy") if allow_heavy else ("majority",):
        for c in range(r) if colour is None else (colour,):
            h = colour_graph(c, rule)
            clique = next((q for q in nx.find_cliques(h) if len(q) >= h1), None)
            if clique is not None:
                chosen = (c, rule, tuple(sorted(clique)[:h1]))
                break
        if chosen:
            break
    if chosen is None:
        reduced = {f"{X}-{Y}": [float(cdens[(X, Y, k)]) for k in range(r)] for X, Y in combinations(S, 2)}
        raise NoMonochromaticClique(f"no colour has a {h1}-clique among {len(S)} clean parts", reduced)
    chi, rule, Xs = chosen

    # 4. bad fine parts
    dense_floor = Fraction(5, 8 * r)
    bad_fine: dict[int, list[int]] = {}
    for X in Xs:
        bad = set()
        for a in children[X]:
            U = fine[a]
            if len(Z.intersection(U)) * z_fraction.denominator >= z_fraction.numerator * len(U):
                bad.add(a)
                continue
            for Y in Xs:
                if Y == X:
                    continue
                off = 0
                for b in children[Y]:
                    key = fine_key(a, b, chi)
                    if not freg.get(key, True) or fdens[key] <= dense_floor:
                        off += 1
                if off > bad_part_fraction * len(children[Y]):
                    bad.add(a)
                    break
        bad_fine[X] = sorted(bad)

    # 5. trim to a common size avoiding Z
    good = {X: [a for a in children[X] if a not in bad_fine[X]] for X in Xs}
    if any(not good[X] for X in Xs):
        raise NoMonochromaticClique("a chosen coarse part has no usable fine parts", {})
    t = min(math.floor(keep_fraction * len(fine[a])) for X in Xs for a in good[X])
    trimmed = {a: tuple(sorted(v for v in fine[a] if v not in Z)[:t]) for X in Xs for a in good[X]}
    if any(len(trimmed[a]) < t for a in trimmed):
        raise NoMonochromaticClique("Z leaves too few vertices in a fine part", {})

    q = min(len(good[X]) for X in Xs)
    if reserve:
        q = q // 2
        if q < 1:
            raise NoMonochromaticClique("not enough good fine parts to keep a reserve", {})
    fine_sel = tuple(tuple(trimmed[a] for a in good[X][:q]) for X in Xs)
    spare = tuple(tuple(trimmed[a] for a in good[X][q:]) for X in Xs)
    parts = tuple(tuple(sorted(v for U in fs for v in U)) for fs in fine_sel)
    return PartSelection(
        colour=chi, coarse_indices=Xs, parts=parts, fine=fine_sel, reserve=spare, rule=rule,
        bad_coarse_pairs=bad_pairs, bad_fine_parts=bad_fine,
        coarse_density={(X, Y): cdens[(X, Y, chi)] for X, Y in combinations(Xs, 2)},
    )
