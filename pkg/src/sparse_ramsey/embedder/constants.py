"""Constant packs: exact formulas for symbolic checks, small values for runs."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from ..regularity.pairs import as_fraction

# Beyond this lookahead radius 2*Delta^l1 is not worth materialising.
PAPER_L1_CAP = 4096


class InfeasibleConstants(ValueError):
    pass


def _frac_json(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    return x


@dataclass(frozen=True)
class ConstantsPack:
    """Parameters of the embedding procedure.

    ``hsz_distance`` is the distance used for the part assignment of ``F``
    (classes are pairwise further apart than this); ``depth`` is how many
    still-unembedded vertices of a rooted core the cross-off step enumerates
    exactly before relying on expectations.
    """

    D: int
    Delta: int
    r: int
    mu: Fraction
    d: Fraction
    h0: int
    l1: int
    h1: int
    kappa: Fraction
    rho: Fraction
    K: Fraction | None = None
    K0: Fraction | None = None
    mode: str = "practical"
    hsz_distance: int = 1
    depth: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("mu", "d", "kappa", "rho"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        for name in ("K", "K0"):
            if getattr(self, name) is not None:
                object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.D < 1 or self.Delta < self.D or self.r < 1:
            raise ValueError("need 1 <= D <= Delta and r >= 1")
        if not 0 < self.mu:
            raise ValueError("mu must be positive")
        if self.h1 < self.Delta + 1:
            raise ValueError(f"h1={self.h1} must be at least Delta+1={self.Delta + 1}")
        for name in ("d", "kappa", "rho"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.l1 < 1 or self.h0 < 1 or self.depth < 0 or self.hsz_distance < 1:
            raise ValueError("l1, h0, hsz_distance must be positive and depth non-negative")
        if self.mode == "paper":
            self._check_paper()
        elif self.mode != "practical":
            raise ValueError(f"unknown mode {self.mode!r}")

    def _check_paper(self):
        h0, l1, h1 = paper_sizes(self.D, self.Delta, self.mu)
        if (self.h0, self.l1, self.h1) != (h0, l1, h1):
            raise ValueError("paper-mode sizes do not match their defining formulas")
        if self.d != Fraction(1, 2 * self.r):
            raise ValueError("paper mode requires d = 1/(2r)")
        if self.K is None or self.K0 is None:
            raise ValueError("paper mode needs K and K0")
        if self.kappa != self.d**self.D / (20 * self.h1 * self.K):
            raise ValueError("paper mode requires kappa = d^D / (20 h1 K)")
        if self.rho != self.d**self.D / (4 * self.K0):
            raise ValueError("paper mode requires rho = d^D / (4 K0)")

    @property
    def L(self) -> int:
        return 2 * self.Delta**self.l1 * self.h1

    @classmethod
    def paper(cls, D: int, Delta: int, r: int, mu, K, K0) -> "ConstantsPack":
        """Exact pack; raises :class:`InfeasibleConstants` when the lookahead
        radius is too large to materialise."""
        mu = as_fraction(mu)
        h0, l1, h1 = paper_sizes(D, Delta, mu)
        d = Fraction(1, 2 * r)
        K, K0 = as_fraction(K), as_fraction(K0)
        return cls(D=D, Delta=Delta, r=r, mu=mu, d=d, h0=h0, l1=l1, h1=h1,
                   kappa=d**D / (20 * h1 * K), rho=d**D / (4 * K0), K=K, K0=K0, mode="paper",
                   hsz_distance=l1, depth=l1)

    @classmethod
    def practical(cls, D: int, Delta: int, r: int, mu, *, d=None, h0: int = 8, l1: int = 2,
                  h1: int | None = None, kappa=Fraction(1, 2), rho=Fraction(1, 100),
                  hsz_distance: int = 1, depth: int = 1, **extra) -> "ConstantsPack":
        return cls(D=D, Delta=Delta, r=r, mu=as_fraction(mu),
                   d=Fraction(1, 2 * r) if d is None else as_fraction(d),
                   h0=h0, l1=l1, h1=Delta + 1 if h1 is None else h1, kappa=as_fraction(kappa),
                   rho=as_fraction(rho), hsz_distance=hsz_distance, depth=depth, extra=extra)

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            out[f.name] = _frac_json(getattr(self, f.name))
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "ConstantsPack":
        if isinstance(data, str):
            data = json.loads(data)
        data = dict(data)
        for k, v in list(data.items()):
            if isinstance(v, list) and len(v) == 2 and all(isinstance(t, int) for t in v):
                data[k] = Fraction(v[0], v[1])
        mode = data.get("mode", "practical")
        if mode == "paper":
            return cls.paper(data["D"], data["Delta"], data["r"], data["mu"], data["K"], data["K0"])
        known = {f.name for f in fields(cls)}
        extra = {k: data.pop(k) for k in list(data) if k not in known}
        pack = cls(**data)
        if extra:
            pack = cls(**{**asdict(pack), "extra": {**pack.extra, **extra}})
        return pack


def paper_sizes(D: int, Delta: int, mu) -> tuple[int, int, int]:
    mu = as_fraction(mu)
    h0 = Fraction(16 * D**5) / mu**3
    l1 = D * D * h0 * h0 / mu + 20
    if h0.denominator != 1 or l1.denominator != 1:
        raise InfeasibleConstants("h0 and l1 must be integers; choose mu with 1/mu integral")
    h0, l1 = int(h0), int(l1)
    if l1 > PAPER_L1_CAP:
        raise InfeasibleConstants(
            f"l1 = {l1} exceeds {PAPER_L1_CAP}; h1 = 2*{Delta}^{l1} has ~{int(l1 * math.log10(Delta))} digits"
        )
    return h0, l1, 2 * Delta**l1
