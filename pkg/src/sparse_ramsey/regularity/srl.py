"""Energy increments, witness-driven regular partitions, and the two-level
(coarse/fine) decomposition."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from ..graph import Graph
from .pairs import PairAssessment, as_fraction, assess_pair
from .partition import Partition, equalize

log = logging.getLogger(__name__)


class IterationBudgetExceeded(RuntimeError):
    def __init__(self, message: str, energy_trace: Sequence[Fraction]):
        super().__init__(message)
        self.energy_trace = list(energy_trace)


# -- energy ---------------------------------------------------------------------

def block_edge_counts(partition: Partition, g: Graph) -> np.ndarray:
    """``k x k`` matrix of ``e(U, V)`` between blocks (diagonal: ``2 e(U)``)."""
    S = partition.indicator(g.n)
    # float32 sums are exact below 2^24
    dtype = np.float32 if g.n * g.n < 1 << 24 else np.float64
    A = g.matrix.astype(dtype)
    counts = S.T.astype(dtype) @ (A @ S.astype(dtype))
    return np.rint(counts).astype(np.int64)


def energy(partition: Partition, graphs: Sequence[Graph], p) -> Fraction:
    """``sum over ordered U != V of |U||V| sum_i d_p(U, V; G_i)^2 / n^2``."""
    p = as_fraction(p)
    if not graphs:
        return Fraction(0)
    n = graphs[0].n
    sizes = partition.sizes
    total = Fraction(0)
    for g in graphs:
        c = block_edge_counts(partition, g)
        for i in range(len(sizes)):
            for j in range(len(sizes)):
                if i != j and c[i, j]:
                    # |U||V| d^2 = e^2 / (p^2 |U||V|)
                    total += Fraction(int(c[i, j]) ** 2, sizes[i] * sizes[j])
    return total / (p * p * n * n)


def defect_cauchy_schwarz(lam: Sequence, d, rho: Sequence) -> tuple[Fraction, Fraction]:
    """Both sides of ``sum lam_i (d + rho_i)^2 = d^2 + sum lam_i rho_i^2``."""
    lam = [as_fraction(x) for x in lam]
    rho = [as_fraction(x) for x in rho]
    d = as_fraction(d)
    if len(lam) != len(rho):
        raise ValueError("lam and rho must have equal length")
    if any(x < 0 for x in lam):
        raise ValueError("weights must be non-negative")
    if sum(lam) != 1:
        raise ValueError("weights must sum to 1")
    if sum(l * r for l, r in zip(lam, rho)) != 0:
        raise ValueError("weighted deviations must sum to 0")
    lhs = sum((l * (d + r) ** 2 for l, r in zip(lam, rho)), Fraction(0))
    rhs = d * d + sum((l * r * r for l, r in zip(lam, rho)), Fraction(0))
    return lhs, rhs


# -- pair tables --------------------------------------------------------------------

PairTable = dict[tuple[int, int, int], PairAssessment]


def assess_partition(partition: Partition, graphs: Sequence[Graph], eps, p, *, samples: int = 32,
                     seed: int = 0, spectral: bool | str = False,
                     pairs: Sequence[tuple[int, int]] | None = None) -> PairTable:
    """Assess every block pair (``i < j``) in every colour."""
    table: PairTable = {}
    todo = pairs if pairs is not None else list(combinations(range(len(partition)), 2))
    for c, g in enumerate(graphs):
        for i, j in todo:
            table[(i, j, c)] = assess_pair(
                g, partition[i], partition[j], eps, p, mode="sampled", samples=samples,
                seed=seed + 7919 * c + 104729 * i + j, spectral=spectral,
            )
    return table


def irregular_fraction(table: PairTable, k: int, colour: int) -> float:
    pairs = k * (k - 1) // 2
    if not pairs:
        return 0.0
    bad = sum(1 for (i, j, c), a in table.items() if c == colour and not a.regular)
    return bad / pairs


# -- witness-driven regular partition ---------------------------------------------

@dataclass
class SrlResult:
    partition: Partition
    table: PairTable
    energy_trace: list[Fraction]
    rounds: int


def _refine_by_witnesses(partition: Partition, table: PairTable, max_witnesses: int,
                         max_parts: int) -> Partition | None:
    per_block: dict[int, list[tuple[float, frozenset[int]]]] = {i: [] for i in range(len(partition))}
    for (i, j, _), a in table.items():
        if not a.regular and a.witness is not None:
            per_block[i].append((a.deviation, frozenset(a.witness[0])))
            per_block[j].append((a.deviation, frozenset(a.witness[1])))
    keys: dict[int, tuple] = {}
    used = 0
    for i, block in enumerate(partition.blocks):
        wits = [w for _, w in sorted(per_block[i], key=lambda t: -t[0])][:max_witnesses]
        used = max(used, len(wits))
        for v in block:
            keys[v] = tuple(0 if v in w else 1 for w in wits)
    s = 2 ** max(used, 1)
    while s > 1 and len(partition) * s > max_parts:
        s //= 2
    if s < 2:
        return None
    return equalize(partition.split_each(s, keys))


def _srl(graphs: Sequence[Graph], eps, p, start: Partition, *, min_split: int = 1,
         max_parts: int = 256, budget: int = 8, samples: int = 32, seed: int = 0,
         spectral: bool | str = False, max_witnesses: int = 2) -> SrlResult:
    eps = as_fraction(eps)
    P = start
    if min_split > 1:
        if len(P) * min_split > max_parts:
            raise IterationBudgetExceeded("forced split exceeds the part budget", [])
        P = equalize(P.split_each(min_split))
    trace = [energy(P, graphs, p)]
    for rounds in range(budget + 1):
        table = assess_partition(P, graphs, eps, p, samples=samples, seed=seed + rounds, spectral=spectral)
        worst = max((irregular_fraction(table, len(P), c) for c in range(len(graphs))), default=0.0)
        log.debug("srl round %d: %d parts, worst irregular fraction %.3f", rounds, len(P), worst)
        if worst <= eps:
            return SrlResult(P, table, trace, rounds)
        if rounds == budget:
            break
        refined = _refine_by_witnesses(P, table, max_witnesses, max_parts)
        if refined is None:
            break
        P = refined
        trace.append(energy(P, graphs, p))
    raise IterationBudgetExceeded(
        f"no ({float(eps):.3g}, p)-regular partition within budget ({len(P)} parts)", trace
    )


def srl_partition(graphs: Sequence[Graph], eps, t0: int, p, *, start: Partition | None = None,
                  min_split: int = 1, max_parts: int = 256, budget: int = 8, samples: int = 32,
                  seed: int = 0, spectral: bool | str = False) -> Partition:
    """Equitable partition in which, per colour, at most an ``eps`` fraction
    of block pairs look irregular under sampled assessment.

    Starts from ``start`` (or ``t0`` contiguous blocks) and repeatedly splits
    blocks along the witnesses of irregular pairs, re-equalising each time.
    """
    if not graphs:
        raise ValueError("need at least one colour class")
    if start is None:
        start = Partition.equipartition(graphs[0].n, t0)
    return _srl(graphs, eps, p, start, min_split=min_split, max_parts=max_parts, budget=budget,
                samples=samples, seed=seed, spectral=spectral).partition


# -- coarse/fine decomposition ----------------------------------------------------

@dataclass
class RegularityDecomposition:
    coarse: Partition
    fine: Partition
    pairs: PairTable
    coarse_pairs: PairTable
    energy_trace: list[Fraction]
    gains: list[Fraction] = field(default_factory=list)
    eps: Fraction = Fraction(0)
    fine_eps: Fraction = Fraction(0)
    p: Fraction = Fraction(1)
    iterations: int = 0

    @property
    def fine_parent(self) -> list[int]:
        return self.fine.parent_map(self.coarse)

    def to_json(self) -> dict:
        return {
            "coarse": [list(b) for b in self.coarse.blocks],
            "fine": [list(b) for b in self.fine.blocks],
            "pairs": [
                {"i": i, "j": j, "colour": c, **a.to_json()}
                for (i, j, c), a in sorted(self.pairs.items())
            ],
            "energy_trace": [[e.numerator, e.denominator] for e in self.energy_trace],
        }


def density_deviations(coarse: Partition, fine: Partition, graphs: Sequence[Graph], p,
                       eps) -> list[int]:
    """Per colour, the number of ordered fine pairs in distinct coarse blocks
    whose p-density is more than ``eps`` away from their coarse pair's."""
    p = as_fraction(p)
    eps = as_fraction(eps)
    parent = fine.parent_map(coarse)
    cs, fs = coarse.sizes, fine.sizes
    out = []
    for g in graphs:
        cc = block_edge_counts(coarse, g)
        fc = block_edge_counts(fine, g)
        bad = 0
        for a, b in combinations(range(len(fine)), 2):
            X, Y = parent[a], parent[b]
            if X == Y:
                continue
            dc = Fraction(int(cc[X, Y])) / (p * cs[X] * cs[Y])
            df = Fraction(int(fc[a, b])) / (p * fs[a] * fs[b])
            if abs(df - dc) > eps:
                bad += 2
        out.append(bad)
    return out


def strengthened_srl(graphs: Sequence[Graph], eps, f: Callable[[int], float], k0: int, p, *,
                     fine_split: int = 4, first_split: int = 1, max_iterations: int = 8,
                     max_parts: int = 256, samples: int = 32, seed: int = 0,
                     spectral: bool | str = False, srl_budget: int = 8) -> RegularityDecomposition:
    """Iterate the regular-partition step until the fine partition's pair
    densities match the coarse ones (all but ``eps |P_f|^2`` pairs).

    Iteration ``i`` regularises ``P_{i-1}`` at ``min(eps/2, f(|P_{i-1}|))``;
    the result is the candidate fine partition.  If it fails the density
    condition (or ``i == 1``) it is re-equalised into ``P_i`` and the loop
    continues.  ``energy_trace`` holds ``E(P_1), E(P_2), ...`` and finally
    the energy of the returned fine partition; ``gains`` records
    ``E(P_i) - E(P_{i-1})`` for ``i >= 2``.
    """
    eps = as_fraction(eps)
    p = as_fraction(p)
    n = graphs[0].n
    P_prev = Partition.equipartition(n, k0)
    trace: list[Fraction] = []
    gains: list[Fraction] = []
    for i in range(1, max_iterations + 1):
        eps_i = min(eps / 2, as_fraction(f(len(P_prev))))
        res = _srl(graphs, eps_i, p, P_prev, min_split=first_split if i == 1 else fine_split,
                   max_parts=max_parts, budget=srl_budget, samples=samples, seed=seed + 1000 * i,
                   spectral=spectral)
        if i > 1:
            limit = eps * len(res.partition) ** 2
            devs = density_deviations(P_prev, res.partition, graphs, p, eps)
            log.debug("iteration %d: density deviations %s (limit %.1f)", i, devs, float(limit))
            if all(d <= limit for d in devs):
                coarse_pairs = assess_partition(P_prev, graphs, eps, p, samples=samples, seed=seed,
                                                spectral=spectral)
                trace.append(energy(res.partition, graphs, p))
                return RegularityDecomposition(
                    coarse=P_prev, fine=res.partition, pairs=res.table, coarse_pairs=coarse_pairs,
                    energy_trace=trace, gains=gains, eps=eps, fine_eps=eps_i, p=p, iterations=i,
                )
        P_i = equalize(res.partition)
        e_i = energy(P_i, graphs, p)
        if i >= 2:
            gains.append(e_i - trace[-1])
        trace.append(e_i)
        P_prev = P_i
    raise IterationBudgetExceeded("strengthened regularity did not settle within the iteration budget", trace)
