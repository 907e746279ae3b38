"""Seeded G(N, p) sampling and typicality checks for random graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .density import RootedPattern
from .graph import Graph

EXTENSION_LIMIT = 12


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial; depends only on ``(seed, trial)``."""
    return np.random.default_rng([int(seed), int(trial)])


@dataclass(frozen=True)
class EnsembleSpec:
    N: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")


@dataclass
class PropertyVerdict:
    violations: list[tuple] = field(default_factory=list)
    tested: int = 0
    mode: str = "exhaustive"

    @property
    def holds(self) -> bool:
        return not self.violations

    def merge(self, other: "PropertyVerdict") -> None:
        self.violations.extend(other.violations)
        self.tested += other.tested
        if other.mode == "sampled":
            self.mode = "sampled"

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "tested": self.tested,
            "mode": self.mode,
            "violations": [
                {"witness": [int(v) for v in w] if isinstance(w, tuple) else w,
                 "observed": obs, "required": list(req)}
                for w, obs, req in self.violations
            ],
        }


def sample_gnp(spec: EnsembleSpec) -> Graph:
    """Row-by-row sampling of the upper triangle; byte-identical per seed."""
    N, p = spec.N, spec.p
    rng = np.random.default_rng(spec.seed)
    a = np.zeros((N, N), dtype=bool)
    for i in range(N - 1):
        a[i, i + 1 :] = rng.random(N - 1 - i) < p
    a |= a.T
    return Graph.from_matrix(a)


def chernoff_tail(mean: float, delta: float) -> float:
    if not 0 < delta < 1.5:
        raise ValueError("delta must lie in (0, 3/2)")
    return math.exp(-delta * delta * mean / 3)


def hypergeom_tail(setsize: int, draw: int, n: int, delta: float) -> float:
    if not 0 < delta < 1.5:
        raise ValueError("delta must lie in (0, 3/2)")
    return 2 * math.exp(-delta * delta * setsize * draw / (3 * n))


# -- neighbourhood and star properties --------------------------------------

def _window(target: float, eps: float) -> tuple[float, float]:
    return ((1 - eps) * target, (1 + eps) * target)


def _random_ksets(rng: np.random.Generator, N: int, k: int, count: int) -> np.ndarray:
    out = np.empty((count, k), dtype=np.int64)
    for i in range(count):
        out[i] = np.sort(rng.choice(N, size=k, replace=False))
    return out


def _joint_sizes(a: np.ndarray, sets: np.ndarray) -> np.ndarray:
    return np.logical_and.reduce(a[sets], axis=1).sum(axis=1)


def check_neighbourhood_property(g: Graph, D: int, eps: float, p: float, *,
                                 budget: int = 2_000_000, samples: int = 500,
                                 seed: int = 0) -> PropertyVerdict:
    """Every k-set, k <= D, has ``(1 +- eps) p^k N`` common neighbours.

    Exhaustive for each k with ``C(N, k) <= budget``, sampled otherwise.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    N = g.n
    a = g.matrix
    verdict = PropertyVerdict()
    rng = np.random.default_rng(seed)
    for k in range(1, min(D, N) + 1):
        lo, hi = _window(p**k * N, eps)
        if math.comb(N, k) <= budget:
            if k == 1:
                sets = np.arange(N)[:, None]
                sizes = g.degrees
            elif k == 2:
                af = a.astype(np.float32)
                gram = np.rint(af @ af).astype(np.int64)
                iu = np.triu_indices(N, 1)
                sets = np.stack(iu, axis=1)
                sizes = gram[iu]
            else:
                sets = np.array(list(combinations(range(N), k)), dtype=np.int64)
                sizes = _joint_sizes(a, sets)
        else:
            verdict.mode = "sampled"
            sets = _random_ksets(rng, N, k, samples)
            sizes = _joint_sizes(a, sets)
        bad = np.flatnonzero((sizes < lo) | (sizes > hi))
        verdict.tested += len(sizes)
        verdict.violations.extend(
            (tuple(int(v) for v in sets[i]), int(sizes[i]), (lo, hi)) for i in bad
        )
    return verdict


def check_star_property(g: Graph, D: int, eps: float, p: float, *, families: int = 500,
                        family_size: int | None = None, seed: int = 0) -> PropertyVerdict:
    """Unions of joint neighbourhoods of disjoint k-sets have the expected size.

    For each k <= D, ``families`` random families are drawn, each of a size
    chosen uniformly from ``1..max(1, floor(eps p^-k))`` unless
    ``family_size`` fixes it.
    """
    if D < 1:
        raise ValueError("D must be at least 1")
    N = g.n
    a = g.matrix
    rng = np.random.default_rng(seed)
    verdict = PropertyVerdict(mode="sampled")
    for k in range(1, min(D, N) + 1):
        cap = max(1, math.floor(eps * p ** (-k))) if p > 0 else 1
        cap = min(cap, N // k)
        for _ in range(families):
            m = family_size if family_size is not None else int(rng.integers(1, cap + 1))
            verts = rng.choice(N, size=m * k, replace=False).reshape(m, k)
            union = np.logical_or.reduce(np.logical_and.reduce(a[verts], axis=1), axis=0)
            size = int(union.sum())
            lo, hi = _window(p**k * N * m, eps)
            verdict.tested += 1
            if not lo <= size <= hi:
                witness = tuple(tuple(sorted(int(v) for v in B)) for B in verts)
                verdict.violations.append((witness, size, (lo, hi)))
    return verdict


def check_upper_regular(g: Graph, eta: float, p: float, *, samples: int = 500,
                        lower: bool = False, seed: int = 0) -> PropertyVerdict:
    """Sampled check of ``e(X, Y) <= (1 + eta) p |X||Y|`` for disjoint
    ``X, Y`` of size at least ``eta n`` (and the lower companion if asked)."""
    n = g.n
    a = g.matrix
    rng = np.random.default_rng(seed)
    verdict = PropertyVerdict(mode="sampled")
    smallest = max(1, math.ceil(eta * n))
    largest = n // 2
    if smallest > largest:
        return verdict
    for _ in range(samples):
        sx, sy = (int(s) for s in rng.integers(smallest, largest + 1, size=2))
        perm = rng.permutation(n)
        X, Y = np.sort(perm[:sx]), np.sort(perm[sx : sx + sy])
        e = int(a[np.ix_(X, Y)].sum())
        lo = (1 - eta) * p * sx * sy if lower else -math.inf
        hi = (1 + eta) * p * sx * sy
        verdict.tested += 1
        if not lo <= e <= hi:
            verdict.violations.append(((sx, sy), e, (lo, hi)))
    return verdict


# -- rooted extensions -----------------------------------------------------------

def _extension_order(h: Graph, roots: frozenset[int]) -> list[int]:
    """Free vertices, each chosen to have the most already-placed neighbours."""
    placed = set(roots)
    todo = [v for v in range(h.n) if v not in roots]
    order = []
    while todo:
        v = max(todo, key=lambda u: (len(h.adj[u] & placed), -u))
        order.append(v)
        placed.add(v)
        todo.remove(v)
    return order


def count_extensions(host: Graph, rp: RootedPattern, pi: Mapping[int, int],
                     limit: int = EXTENSION_LIMIT) -> int:
    """Number of injective ``phi`` extending ``pi`` that map every pattern edge
    with at most one root endpoint onto a host edge."""
    h, roots = rp.h, rp.roots
    if set(pi) != set(roots):
        raise ValueError("pi must be defined exactly on the roots")
    images = [int(pi[r]) for r in sorted(roots)]
    if len(set(images)) != len(images):
        raise ValueError("pi must be injective")
    host.check_vertices(images)
    order = _extension_order(h, roots)
    if len(order) > limit:
        raise ValueError(f"pattern has {len(order)} free vertices; limit is {limit}")
    if not order:
        return 1
    a = host.matrix
    phi = {r: int(pi[r]) for r in roots}
    used = np.zeros(host.n, dtype=bool)
    used[images] = True
    back = [[u for u in h.adj[v] if u in roots or u in order[:i]] for i, v in enumerate(order)]

    def rec(i: int) -> int:
        cand = ~used
        for u in back[i]:
            cand = cand & a[phi[u]]
        if i == len(order) - 1:
            return int(cand.sum())
        total = 0
        v = order[i]
        for w in np.flatnonzero(cand).tolist():
            phi[v] = w
            used[w] = True
            total += rec(i + 1)
            used[w] = False
        phi.pop(v, None)
        return total

    return rec(0)


def expected_extensions(rp: RootedPattern, N: int, p: float) -> float:
    free = rp.free
    edges = rp.h.e(free) + rp.h.e_between(free, rp.roots)
    return float(N) ** len(free) * float(p) ** edges


@dataclass
class ConcentrationReport:
    expected: float
    ratios: list[float]
    eps: float

    @property
    def in_window(self) -> int:
        return sum(1 for r in self.ratios if abs(r - 1) <= self.eps)

    @property
    def fraction(self) -> float:
        return self.in_window / len(self.ratios) if self.ratios else 1.0

    @property
    def min_ratio(self) -> float:
        return min(self.ratios, default=1.0)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=1.0)


def concentration_experiment(rp: RootedPattern, spec: EnsembleSpec, eps: float, trials: int,
                             host: Graph | None = None) -> ConcentrationReport:
    """Sample ``G(N, p)`` once and ``trials`` uniform root maps; record
    ``Ext / E`` for each."""
    host = sample_gnp(spec) if host is None else host
    expected = expected_extensions(rp, spec.N, spec.p)
    roots = sorted(rp.roots)
    ratios = []
    for t in range(trials):
        rng = trial_rng(spec.seed, t)
        images = rng.choice(spec.N, size=len(roots), replace=False)
        pi = dict(zip(roots, (int(v) for v in images)))
        ratios.append(count_extensions(host, rp, pi) / expected)
    return ConcentrationReport(expected, ratios, eps)


def extension_expectation_exact(rp: RootedPattern, N: int, p: Fraction) -> Fraction:
    """Exact rational version of :func:`expected_extensions`."""
    free = rp.free
    edges = rp.h.e(free) + rp.h.e_between(free, rp.roots)
    return Fraction(N) ** len(free) * Fraction(p) ** edges
