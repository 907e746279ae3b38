"""Greedy injectivization over a random multi-level partition of the host."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

Oracle = Callable[[Mapping[int, int], int], np.ndarray]


def level_partition(N: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Random partition into ``ceil(ln N)`` levels: the first holds half the
    vertices, the others ``ceil(N / (2l - 2))`` each (the last takes what is left)."""
    ell = max(1, math.ceil(math.log(N))) if N > 1 else 1
    perm = rng.permutation(N)
    if ell == 1:
        return [np.sort(perm)]
    first = N // 2
    size = math.ceil(N / (2 * ell - 2))
    out = [np.sort(perm[:first])]
    start = first
    for _ in range(ell - 1):
        out.append(np.sort(perm[start:start + size]))
        start += size
    return out


def fill_schedule(level_sizes: Sequence[int], n: int, N: int, rho: float, p: float, D: int,
                  Delta: int) -> list[float]:
    """Occupancy caps ``k_j``: ``k_1 = max(n, 1e-6 rho^2 N)`` and
    ``k_j = 16 D Delta D / (rho p^D |V_{j-1}|) * k_{j-1}``."""
    k = [max(float(n), 1e-6 * rho * rho * N)]
    for j in range(1, len(level_sizes)):
        prev = max(1, level_sizes[j - 1])
        k.append(16 * D * Delta * D / (rho * p ** D * prev) * k[-1])
    return k


@dataclass
class CNResult:
    psi: dict[int, int]
    levels: dict[int, int]
    occupancy: list[int]
    schedule: list[float]
    failed_at: int | None = None
    occupancy_trace: list[list[int]] = field(default_factory=list)
    p2_violations: list = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.failed_at is None

    @property
    def schedule_respected(self) -> bool:
        return all(o <= k for o, k in zip(self.occupancy, self.schedule))

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "failed_at": self.failed_at,
            "occupancy": self.occupancy,
            "schedule": self.schedule,
            "p2_violations": len(self.p2_violations),
        }


def cn_injectivize(N: int, order: Sequence[int], oracle: Oracle, rho: float, D: int, p: float,
                   Delta: int, *, seed: int = 0, rng: np.random.Generator | None = None,
                   left_degree: Callable[[int], int] | None = None, policy: str = "random",
                   commit: Callable[[Mapping[int, int], int, int], None] | None = None) -> CNResult:
    """Embed ``order`` one vertex at a time, each into the lowest level
    that still has an unused vertex of ``oracle(psi, x)``."""
    rng = rng if rng is not None else np.random.default_rng(seed)
    levels = level_partition(N, rng)
    level_of = np.empty(N, dtype=np.int64)
    for j, L in enumerate(levels):
        level_of[L] = j
    schedule = fill_schedule([len(L) for L in levels], len(order), N, rho, p, D, Delta)
    used = np.zeros(N, dtype=bool)
    occupancy = [0] * len(levels)
    res = CNResult({}, {}, occupancy, schedule)
    for x in order:
        W = np.asarray(oracle(res.psi, x), dtype=np.int64)
        if left_degree is not None and len(W) < rho * p ** left_degree(x) * N:
            res.p2_violations.append((x, len(W)))
        free = W[~used[W]]
        if not len(free):
            res.failed_at = x
            break
        lv = level_of[free]
        j = int(lv.min())
        pool = free[lv == j]
        v = int(pool.min()) if policy == "lowest" else int(pool[rng.integers(len(pool))])
        res.psi[x] = v
        res.levels[x] = j
        used[v] = True
        occupancy[j] += 1
        res.occupancy_trace.append(list(occupancy))
        if commit is not None:
            commit(res.psi, x, v)
    return res
