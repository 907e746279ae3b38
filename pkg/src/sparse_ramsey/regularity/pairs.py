"""p-densities and regular-pair assessment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..graph import Graph

EXHAUSTIVE_LIMIT = 16


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; decimal floats such as 0.15 become 3/20."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _as_index(vs) -> np.ndarray:
    return np.asarray(sorted(int(v) for v in vs), dtype=np.int64)


def biadjacency(g: Graph, U, V) -> np.ndarray:
    return g.matrix[np.ix_(_as_index(U), _as_index(V))]


def p_density(g: Graph, U, V, p) -> Fraction:
    """``e(U, V) / (p |U| |V|)`` as an exact rational."""
    p = as_fraction(p)
    if p == 0:
        raise ValueError("p must be positive")
    U, V = set(U), set(V)
    if not U or not V:
        raise ValueError("U and V must be nonempty")
    if U & V:
        raise ValueError("U and V must be disjoint")
    e = int(biadjacency(g, U, V).sum())
    return Fraction(e) / (p * len(U) * len(V))


@dataclass(frozen=True)
class PairAssessment:
    density: Fraction
    regular: bool
    epsilon: Fraction
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    mode: str
    tested: int = 0
    deviation: float = 0.0

    def to_json(self) -> dict:
        return {
            "density_num": self.density.numerator,
            "density_den": self.density.denominator,
            "regular": self.regular,
            "mode": self.mode,
            "tested": self.tested,
        }


def _min_size(eps: Fraction, size: int) -> int:
    return max(1, math.ceil(eps * size))


def _exhaustive(B: np.ndarray, eps: Fraction, p: Fraction, d: Fraction):
    """Scan every ``U'``; for each size ``k`` of ``V'`` the extreme values of
    ``e(U', V')`` come from the ``k`` largest or smallest column sums."""
    a, b = B.shape
    ka, kb = _min_size(eps, a), _min_size(eps, b)
    masks = np.arange(1 << a, dtype=np.int64)
    usize = np.bitwise_count(masks)
    masks = masks[usize >= ka]
    bits = ((masks[:, None] >> np.arange(a)) & 1).astype(np.int64)
    cols = bits @ B.astype(np.int64)
    order = np.argsort(cols, axis=1, kind="stable")
    srt = np.take_along_axis(cols, order, axis=1)
    low = np.cumsum(srt, axis=1)
    high = np.cumsum(srt[:, ::-1], axis=1)
    tested = 0
    for k in range(kb, b + 1):
        sizes = np.bitwise_count(masks).astype(np.int64) * k
        tested += len(masks)
        for ext, pick in ((high[:, k - 1], "high"), (low[:, k - 1], "low")):
            # |e - d p |U'| k| > eps p |U'| k, in integers
            lhs = np.abs(ext * d.denominator * p.denominator - d.numerator * p.numerator * sizes)
            rhs = eps * p * d.denominator * p.denominator
            hit = np.flatnonzero(lhs * rhs.denominator > rhs.numerator * sizes)
            if len(hit):
                i = int(hit[0])
                rows = tuple(int(j) for j in np.flatnonzero(bits[i]))
                cidx = order[i, ::-1][:k] if pick == "high" else order[i, :k]
                dev = abs(Fraction(int(ext[i])) / (p * int(sizes[i])) - d)
                return False, (rows, tuple(sorted(int(c) for c in cidx))), tested, dev
    return True, None, tested, Fraction(0)


def _top_singular(M: np.ndarray, iters: int = 60, seed: int = 0) -> tuple[float, np.ndarray, np.ndarray]:
    if min(M.shape) <= 64:
        u, s, vt = np.linalg.svd(M, full_matrices=False)
        return float(s[0]), u[:, 0], vt[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[1])
    for _ in range(iters):
        u = M @ v
        u /= np.linalg.norm(u) or 1.0
        v = M.T @ u
        s = np.linalg.norm(v)
        v /= s or 1.0
    return float(s), u, v


def spectral_candidates(B: np.ndarray, dp: float, eps: float, seed: int = 0, extremes: bool = True):
    """Subset pairs suggested by the top singular pair of ``B - dp J``:
    sign splits and (with ``extremes``) the extreme ``eps`` fractions."""
    a, b = B.shape
    M = B.astype(np.float64) - dp
    _, u, v = _top_singular(M, seed=seed)
    ka, kb = max(1, math.ceil(eps * a)), max(1, math.ceil(eps * b))
    out = []
    for su in (u, -u):
        for sv in (v, -v):
            rows = np.flatnonzero(su > 0)
            cols = np.flatnonzero(sv > 0)
            if len(rows) >= ka and len(cols) >= kb:
                out.append((rows, cols))
            if extremes:
                out.append((np.argsort(-su, kind="stable")[:ka], np.argsort(-sv, kind="stable")[:kb]))
    return out


def spectral_norm(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2))


def assess_pair(g: Graph, U, V, eps, p, mode: str = "auto", *, samples: int = 64,
                seed: int = 0, spectral: bool | str = False) -> PairAssessment:
    """Decide whether every ``U' ⊆ U``, ``V' ⊆ V`` with ``|U'| >= eps|U|`` and
    ``|V'| >= eps|V|`` has p-density within ``eps`` of ``d_p(U, V)``.

    Modes:

    ``exhaustive``
        exact, for ``|U|, |V| <= 16``.
    ``certified``
        exact one-sided: regular whenever the spectral bound
        ``||B - dpJ|| / (p eps sqrt(|U||V|)) <= eps`` holds; otherwise falls
        back to sampling.
    ``sampled``
        random subset pairs; heuristic.  ``spectral=True`` adds the sign
        splits of the top singular vectors of ``B - dpJ`` and
        ``spectral="full"`` also their extreme ``eps`` fractions.  Both find
        genuine witnesses in sparse random pairs of a few hundred vertices.
    """
    eps = as_fraction(eps)
    p = as_fraction(p)
    Ui, Vi = _as_index(U), _as_index(V)
    if not len(Ui) or not len(Vi):
        raise ValueError("U and V must be nonempty")
    if set(Ui.tolist()) & set(Vi.tolist()):
        raise ValueError("U and V must be disjoint")
    B = g.matrix[np.ix_(Ui, Vi)]
    a, b = B.shape
    d = Fraction(int(B.sum())) / (p * a * b)
    if mode == "auto":
        mode = "exhaustive" if max(a, b) <= EXHAUSTIVE_LIMIT else "sampled"
    if mode == "exhaustive":
        if max(a, b) > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive assessment limited to {EXHAUSTIVE_LIMIT} vertices per side")
        ok, wit, tested, dev = _exhaustive(B, eps, p, d)
        if wit is not None:
            wit = (tuple(int(Ui[i]) for i in wit[0]), tuple(int(Vi[j]) for j in wit[1]))
        return PairAssessment(d, ok, eps, wit, "exhaustive", tested, float(dev))
    if mode == "certified":
        sigma = spectral_norm(B.astype(np.float64) - float(d * p))
        bound = sigma / (float(p) * float(eps) * math.sqrt(a * b))
        if bound * (1 + 1e-9) <= float(eps):
            return PairAssessment(d, True, eps, None, "certified", 1, bound)
        res = _sampled(B, Ui, Vi, eps, p, d, samples, seed, spectral)
        return PairAssessment(res.density, res.regular, eps, res.witness, "sampled", res.tested, res.deviation)
    if mode == "sampled":
        return _sampled(B, Ui, Vi, eps, p, d, samples, seed, spectral)
    raise ValueError(f"unknown mode {mode!r}")


def _sampled(B, Ui, Vi, eps: Fraction, p: Fraction, d: Fraction, samples: int, seed: int,
             spectral: bool | str) -> PairAssessment:
    a, b = B.shape
    ka, kb = _min_size(eps, a), _min_size(eps, b)
    rng = np.random.default_rng(seed)
    candidates = []
    if spectral and d > 0 and min(a, b) > 1:
        candidates.extend(spectral_candidates(B, float(d * p), float(eps), seed,
                                              extremes=spectral == "full"))
    for _ in range(samples):
        sa = int(rng.integers(ka, a + 1))
        sb = int(rng.integers(kb, b + 1))
        candidates.append((rng.choice(a, sa, replace=False), rng.choice(b, sb, replace=False)))
    fd, fp, fe = float(d), float(p), float(eps)
    worst = (0.0, None)
    for rows, cols in candidates:
        e = int(B[np.ix_(rows, cols)].sum())
        dev = abs(e / (fp * len(rows) * len(cols)) - fd)
        if dev > worst[0]:
            worst = (dev, (rows, cols))
    regular = True
    witness = None
    if worst[1] is not None and worst[0] > fe:
        rows, cols = worst[1]
        e = int(B[np.ix_(rows, cols)].sum())
        if abs(Fraction(e) / (p * len(rows) * len(cols)) - d) > eps:
            regular = False
            witness = (tuple(sorted(int(Ui[i]) for i in rows)), tuple(sorted(int(Vi[j]) for j in cols)))
    return PairAssessment(d, regular, eps, witness, "sampled", len(candidates), worst[0])
