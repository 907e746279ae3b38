"""Vertex-by-vertex growth of a partite homomorphism with lookahead cross-offs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .extensions import (
    TooLarge,
    _Classifier,
    bad_core_completions,
    enumerate_extensions,
    lookahead_budget,
    promise_count,
)
from .instance import EmbeddingInstance

Chooser = Callable[[np.ndarray, int, Mapping[int, int]], "int | None"]


@dataclass
class StepRecord:
    x: int
    W_prime: int
    W: int
    C: dict = field(default_factory=dict)
    deferred: list = field(default_factory=list)
    image: int | None = None
    failure: str | None = None
    c_bound_excess: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "W_prime": self.W_prime,
            "W": self.W,
            "C": {str(k): v for k, v in self.C.items()},
            "deferred": [str(t) for t in self.deferred],
            "image": self.image,
            "failure": self.failure,
        }


@dataclass
class EmbedState:
    """``psi`` maps the embedded prefix of ``F`` into the host; ``steps`` is
    the trajectory, ``budgets`` the bad-extension allowances in force."""

    psi: dict[int, int] = field(default_factory=dict)
    steps: list[StepRecord] = field(default_factory=list)
    budgets: dict = field(default_factory=dict)
    ind1_violations: list = field(default_factory=list)
    ind2_violations: list = field(default_factory=list)
    boundary_violations: list = field(default_factory=list)
    failure: str | None = None

    @property
    def success(self) -> bool:
        return self.failure is None

    def trajectory(self) -> dict:
        return {
            "steps": len(self.steps),
            "W_sizes": [s.W for s in self.steps],
            "W_prime_sizes": [s.W_prime for s in self.steps],
            "C_sizes": [{str(k): v for k, v in s.C.items()} for s in self.steps],
            "failures": [{"x": s.x, "reason": s.failure} for s in self.steps if s.failure],
        }


def candidate_set(inst: EmbeddingInstance, psi: Mapping[int, int], x: int) -> np.ndarray:
    """Common ``G``-neighbourhood of the images of ``x``'s left neighbours
    inside the part of ``x``."""
    mask = inst.part_masks[inst.phi[x]].copy()
    for a in inst.og.left_neighbours(x):
        mask &= inst.A[psi[a]]
    return np.flatnonzero(mask)


def _edges_at(inst: EmbeddingInstance, ctx, U: list[int], known: set[int]) -> int:
    Uset = set(U)
    e = 0
    for u in U:
        for w in inst.og.graph.adj[u]:
            if w in known or (w in Uset and w > u):
                e += 1
    return e


def _crossed_estimate(inst: EmbeddingInstance, psi: Mapping[int, int], x: int, Wp: np.ndarray,
                      target) -> np.ndarray | None:
    """Boolean mask over ``Wp`` of vertices to cross off for ``target``, or
    ``None`` when more than ``depth`` core vertices remain to be completed."""
    clf = _Classifier(inst, target)
    ctx = clf.ctx
    if x not in ctx.core:
        return np.zeros(len(Wp), dtype=bool)
    rank = inst.og.rank
    U = sorted((u for u in ctx.core if rank[u] > rank[x]), key=lambda u: rank[u])
    if len(U) > inst.cp.depth:
        return None
    images = {v: psi[v] for v in ctx.h1 if v in psi}
    embedded = set(images) | {x}
    known = set(ctx.core) | embedded
    vxy, _, _ = lookahead_budget(inst, target, x)
    e0 = _edges_at(inst, ctx, U, known & set(ctx.h1))
    kappa = float(inst.cp.kappa)
    thr = kappa ** (vxy + 1) * float(inst.N) ** len(U) * inst.p ** e0
    taken = np.zeros(inst.N, dtype=bool)
    taken[list(images.values())] = True
    if not U and not clf.segment and x in clf.nb:
        cols = clf.part[clf.base(images)]
        counts = inst.A[np.ix_(Wp, cols)].sum(axis=1)
        bad = (counts < clf.thr) & ~taken[Wp]
        return bad if thr < 1 else np.zeros(len(Wp), dtype=bool)
    if not U and not clf.segment:
        bad = clf.bad(images) and thr < 1
        return np.full(len(Wp), bad) & ~taken[Wp]
    out = np.zeros(len(Wp), dtype=bool)
    for i, v in enumerate(Wp.tolist()):
        if taken[v]:
            continue
        images[x] = v
        out[i] = bad_core_completions(inst, target, images, U, clf) > thr
    images.pop(x, None)
    return out


def _crossed_exact(inst: EmbeddingInstance, psi: Mapping[int, int], x: int, Wp: np.ndarray,
                   target) -> np.ndarray:
    _, _, thr = lookahead_budget(inst, target, x)
    trial = dict(psi)
    out = np.zeros(len(Wp), dtype=bool)
    for i, v in enumerate(Wp.tolist()):
        trial[x] = v
        out[i] = enumerate_extensions(inst, trial, target)[1] > thr
    return out


def cross_off(inst: EmbeddingInstance, psi: Mapping[int, int], x: int, Wp: np.ndarray | None = None,
              *, method: str = "estimate") -> tuple[np.ndarray, dict, list]:
    """``(W, C, deferred)``: ``W`` is ``Wp`` minus the cross-off sets ``C[y]``
    of every lookahead containing ``x``.

    ``method="exact"`` counts all bad extensions of ``H1'`` (tiny hosts
    only); ``"estimate"`` counts bad completions of the core and uses the
    expected count for the rest, skipping targets with more than
    ``cp.depth`` core vertices still open (listed in ``deferred``).
    """
    if Wp is None:
        Wp = candidate_set(inst, psi, x)
    keep = np.ones(len(Wp), dtype=bool)
    C, deferred = {}, []
    for target in inst.targets_of[x]:
        if method == "exact":
            crossed = _crossed_exact(inst, psi, x, Wp, target)
        elif method == "estimate":
            crossed = _crossed_estimate(inst, psi, x, Wp, target)
        else:
            raise ValueError(f"unknown method {method!r}")
        if crossed is None:
            deferred.append(target)
            continue
        C[target] = Wp[crossed]
        keep &= ~crossed
    return Wp[keep], C, deferred


class GrowthOracle:
    """``(psi, x) -> W_psi`` with bookkeeping; the state it updates is
    ``self.state``.  Call ``commit`` after choosing the image of ``x``."""

    def __init__(self, inst: EmbeddingInstance, *, method: str = "estimate", audit: bool = False):
        self.inst = inst
        self.method = method
        self.audit = audit
        self.state = EmbedState()
        self._last_left = {}
        og = inst.og
        for b in inst.embed_order:
            left = og.left_neighbours(b)
            if left:
                self._last_left.setdefault(max(left, key=lambda a: og.rank[a]), []).append(b)

    def __call__(self, psi: Mapping[int, int], x: int) -> np.ndarray:
        inst = self.inst
        Wp = candidate_set(inst, psi, x)
        W, C, deferred = cross_off(inst, psi, x, Wp, method=self.method)
        rec = StepRecord(x, len(Wp), len(W), {k: len(v) for k, v in C.items()}, deferred)
        bound = float(inst.cp.kappa) * inst.N * inst.p ** inst.og.left_degree(x)
        rec.c_bound_excess = [str(k) for k, v in C.items() if len(v) > bound]
        if self.audit:
            for t, crossed in C.items():
                ctx = inst.context(t)
                if x in ctx.boundary and len(crossed):
                    self.state.boundary_violations.append((x, str(t), len(crossed)))
        if not len(W):
            rec.failure = "empty W" if len(Wp) else "empty W'"
            if len(Wp):
                rec.failure += f" (crossed by {sorted(map(str, C))})"
        self.state.steps.append(rec)
        return W

    def commit(self, psi: Mapping[int, int], x: int, v: int) -> None:
        inst = self.inst
        self.state.steps[-1].image = int(v)
        for b in self._last_left.get(x, ()):
            deg = inst.og.left_degree(b)
            got = promise_count(inst.A, inst.parts[inst.phi[b]],
                                [psi[a] for a in inst.og.left_neighbours(b)])
            if got < inst.promise_threshold(b):
                self.state.ind1_violations.append((b, got, inst.promise_threshold(b), deg))
        for t in inst.targets_of[x]:
            v_, e_, thr = lookahead_budget(inst, t, x)
            self.state.budgets[str(t)] = {"v": v_, "e": e_, "threshold": thr}
            if self.audit:
                try:
                    _, bad = enumerate_extensions(inst, psi, t)
                except TooLarge:
                    continue
                if bad > thr:
                    self.state.ind2_violations.append((x, str(t), bad, thr))


def choice_policy(policy: str, seed: int = 0) -> Chooser:
    if policy == "lowest":
        return lambda W, x, psi: int(W.min()) if len(W) else None
    if policy == "random":
        rng = np.random.default_rng(seed)
        return lambda W, x, psi: int(W[rng.integers(len(W))]) if len(W) else None
    raise ValueError(f"unknown policy {policy!r}")


def grow_homomorphism(inst: EmbeddingInstance, policy: str | Chooser = "random", *, seed: int = 0,
                      method: str = "estimate", audit: bool = False) -> EmbedState:
    """Embed the non-segment vertices of ``F`` in order, choosing each image
    from ``W_psi``.  The result need not be injective; see ``cn_injectivize``."""
    choose = choice_policy(policy, seed) if isinstance(policy, str) else policy
    oracle = GrowthOracle(inst, method=method, audit=audit)
    psi = oracle.state.psi
    for x in inst.embed_order:
        W = oracle(psi, x)
        v = choose(W, x, psi)
        if v is None:
            oracle.state.failure = f"step {x}: {oracle.state.steps[-1].failure or 'no choice'}"
            break
        psi[x] = v
        oracle.commit(psi, x, v)
    return oracle.state
