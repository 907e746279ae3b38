"""Vertex partitions: equitability, refinement, re-equalisation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Partition:
    """Ordered list of disjoint blocks covering ``ground`` (default ``range(n)``)."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(v) for v in b)) for b in self.blocks)
        seen: set[int] = set()
        for b in blocks:
            if seen.intersection(b):
                raise ValueError("blocks are not disjoint")
            seen.update(b)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def equipartition(cls, vertices: Sequence[int] | int, k: int) -> "Partition":
        """Split ``vertices`` (in the given order) into ``k`` contiguous chunks
        whose sizes differ by at most one."""
        vs = list(range(vertices)) if isinstance(vertices, int) else list(vertices)
        if k < 1:
            raise ValueError("need at least one block")
        chunks = np.array_split(np.array(vs, dtype=np.int64), k)
        return cls(tuple(tuple(c.tolist()) for c in chunks))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.blocks[i]

    @cached_property
    def ground(self) -> frozenset[int]:
        return frozenset(v for b in self.blocks for v in b)

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def is_equitable(self) -> bool:
        return not self.blocks or max(self.sizes) - min(self.sizes) <= 1

    def block_index(self, n: int) -> np.ndarray:
        """Array mapping each vertex to its block (``-1`` outside the ground set)."""
        out = np.full(n, -1, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            out[list(b)] = i
        return out

    def indicator(self, n: int) -> np.ndarray:
        """``n x k`` 0/1 matrix of block membership."""
        s = np.zeros((n, len(self.blocks)), dtype=np.float64)
        for i, b in enumerate(self.blocks):
            s[list(b), i] = 1.0
        return s

    def refines(self, coarse: "Partition") -> bool:
        if self.ground != coarse.ground:
            return False
        owner = {v: i for i, b in enumerate(coarse.blocks) for v in b}
        return all(len({owner[v] for v in b}) <= 1 for b in self.blocks)

    def parent_map(self, coarse: "Partition") -> list[int]:
        """For each block here, the index of the coarse block containing it."""
        if not self.refines(coarse):
            raise ValueError("not a refinement")
        owner = {v: i for i, b in enumerate(coarse.blocks) for v in b}
        return [owner[b[0]] if b else -1 for b in self.blocks]

    def is_equitable_refinement_of(self, coarse: "Partition") -> bool:
        """Each coarse block holds exactly ``s`` blocks, sizes within a coarse
        block differ by at most one."""
        if not self.refines(coarse):
            return False
        parents = self.parent_map(coarse)
        children: dict[int, list[int]] = {i: [] for i in range(len(coarse))}
        for j, i in enumerate(parents):
            children[i].append(len(self.blocks[j]))
        counts = {len(c) for c in children.values()}
        if len(counts) != 1:
            return False
        return all(max(c) - min(c) <= 1 for c in children.values() if c)

    def split_each(self, s: int, keys: dict[int, tuple] | None = None) -> "Partition":
        """Cut every block into ``s`` chunks of near-equal size.

        Vertices are ordered by ``keys`` (then index) before cutting, so
        vertices sharing a key tend to stay together.
        """
        blocks = []
        for b in self.blocks:
            order = sorted(b, key=(lambda v: (keys.get(v, ()), v)) if keys else None)
            blocks.extend(tuple(c.tolist()) for c in np.array_split(np.array(order, dtype=np.int64), s))
        return Partition(tuple(blocks))


def equalize(partition: Partition) -> Partition:
    """Move as few vertices as possible to make block sizes differ by <= 1.

    Surplus vertices are taken from the largest blocks (highest index first,
    so the low-index core of every block is untouched) and given to the
    smallest ones.
    """
    blocks = [list(b) for b in partition.blocks]
    k = len(blocks)
    total = sum(len(b) for b in blocks)
    if k == 0:
        return partition
    base, extra = divmod(total, k)
    # blocks that are already largest keep the extra slots
    ranking = sorted(range(k), key=lambda i: (-len(blocks[i]), i))
    target = [base] * k
    for i in ranking[:extra]:
        target[i] = base + 1
    pool: list[int] = []
    for i in range(k):
        while len(blocks[i]) > target[i]:
            pool.append(blocks[i].pop())
    pool.sort()
    for i in range(k):
        while len(blocks[i]) < target[i]:
            blocks[i].append(pool.pop(0))
    return Partition(tuple(tuple(b) for b in blocks))


def moved_vertices(before: Partition, after: Partition) -> int:
    """Vertices whose block (matched by position) changed."""
    return sum(len(set(a) - set(b)) for a, b in zip(after.blocks, before.blocks))
