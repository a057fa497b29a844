"""Kac-table data: parameters, simple-object labels, weights and twists."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactmath import CycloNumber


@dataclass(frozen=True, order=True)
class KacLabel:
    m: int
    n: int

    def __str__(self) -> str:
        return f"{self.m},{self.n}"

    @staticmethod
    def parse(s: str) -> KacLabel:
        m, n = s.split(",")
        return KacLabel(int(m), int(n))


@dataclass(frozen=True)
class MinimalModel:
    """Coprime pair (p, q), normalized to p < q at construction."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if p < 2 or q < 2:
            raise ValueError(f"parameters must be at least 2, got ({p}, {q})")
        if math.gcd(p, q) != 1:
            raise ValueError(f"parameters must be coprime, got ({p}, {q})")
        if p > q:
            object.__setattr__(self, "p", q)
            object.__setattr__(self, "q", p)

    @property
    def rank(self) -> int:
        return (self.p - 1) * (self.q - 1) // 2

    def central_charge(self) -> Fraction:
        return 1 - Fraction(6 * (self.p - self.q) ** 2, self.p * self.q)

    def _check_raw(self, m: int, n: int) -> None:
        if not (0 < m < self.p and 0 < n < self.q):
            raise ValueError(f"label ({m},{n}) outside the open Kac rectangle of {self}")

    def canonical(self, m: int, n: int) -> KacLabel:
        """Canonical class representative: the lex-smaller of (m,n), (p-m,q-n)."""
        self._check_raw(m, n)
        return min(KacLabel(m, n), KacLabel(self.p - m, self.q - n))

    def canonical_label(self, x: KacLabel) -> KacLabel:
        return self.canonical(x.m, x.n)

    def conformal_weight(self, x: KacLabel) -> Fraction:
        """Exact weight h, invariant under (m,n) -> (p-m, q-n)."""
        self._check_raw(x.m, x.n)
        return Fraction((x.m * self.q - x.n * self.p) ** 2 - (self.p - self.q) ** 2, 4 * self.p * self.q)

    def h_mod1(self, x: KacLabel) -> Fraction:
        return self.conformal_weight(x) % 1

    def twist(self, x: KacLabel) -> CycloNumber:
        """Exact root of unity exp(2*pi*i*h)."""
        h = self.h_mod1(x)
        return CycloNumber.root_of_unity(h.denominator, h.numerator)

    def simple_current(self) -> KacLabel:
        return self.canonical(1, self.q - 1)

    def simple_current_act(self, x: KacLabel) -> KacLabel:
        """Fusion with the order-two simple current: (m,n) -> (m, q-n)."""
        self._check_raw(x.m, x.n)
        return self.canonical(x.m, self.q - x.n)

    def list_simples(self) -> tuple[KacLabel, ...]:
        return _simples(self.p, self.q)

    def __str__(self) -> str:
        return f"({self.p},{self.q})"

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q}


@lru_cache(maxsize=None)
def _simples(p: int, q: int) -> tuple[KacLabel, ...]:
    model = MinimalModel(p, q)
    seen = {model.canonical(m, n) for m in range(1, p) for n in range(1, q)}
    return tuple(sorted(seen))
