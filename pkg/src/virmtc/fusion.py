"""Fusion rules via admissible label intervals, and a generic fusion-ring container."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .minimal_model import KacLabel, MinimalModel


def fuse(model: MinimalModel, a: KacLabel, b: KacLabel) -> tuple[KacLabel, ...]:
    """Full decomposition of a x b as a sorted tuple of canonical labels."""
    a = model.canonical_label(a)
    b = model.canonical_label(b)
    p, q = model.p, model.q
    out = set()
    for m in range(abs(a.m - b.m) + 1, min(a.m + b.m - 1, 2 * p - 1 - a.m - b.m) + 1, 2):
        for n in range(abs(a.n - b.n) + 1, min(a.n + b.n - 1, 2 * q - 1 - a.n - b.n) + 1, 2):
            out.add(model.canonical(m, n))
    return tuple(sorted(out))


def fusion_coeff(model: MinimalModel, a: KacLabel, b: KacLabel, c: KacLabel) -> int:
    """Structure constant N_{ab}^c; always 0 or 1 in these categories."""
    return int(model.canonical_label(c) in fuse(model, a, b))


class FusionRing:
    """Simple objects with sparse nonnegative-integer structure constants.

    `simples` is an ordered tuple of opaque hashable ids; coefficients are
    immutable after construction.  Coefficients may exceed 1 (needed by the
    extension categories even though ambient coefficients are 0/1).
    """

    def __init__(self, simples, unit_index: int, coeffs: dict[tuple[int, int, int], int]):
        self.simples = tuple(simples)
        self.unit = unit_index
        r = len(self.simples)
        tensor = np.zeros((r, r, r), dtype=np.int64)
        for (a, b, c), v in coeffs.items():
            tensor[a, b, c] = v
            tensor[b, a, c] = v
        self._t = tensor
        self._t.setflags(write=False)
        dual = []
        for a in range(r):
            hits = [b for b in range(r) if tensor[a, b, self.unit]]
            if len(hits) != 1:
                raise ValueError(f"object {self.simples[a]} has no unique dual")
            dual.append(hits[0])
        self.dual = tuple(dual)

    @property
    def rank(self) -> int:
        return len(self.simples)

    def N(self, a: int, b: int, c: int) -> int:
        return int(self._t[a, b, c])

    def fuse(self, a: int, b: int) -> tuple[tuple[int, int], ...]:
        row = self._t[a, b]
        return tuple((c, int(row[c])) for c in np.nonzero(row)[0])

    def matrix(self, a: int) -> np.ndarray:
        """Fusion matrix (N_a)_{bc} = N_{ab}^c."""
        return self._t[a].copy()

    def tensor(self) -> np.ndarray:
        return self._t

    def index(self, s) -> int:
        return self.simples.index(s)

    # -- axioms ---------------------------------------------------------------

    def check_axioms(self) -> None:
        """Raise AssertionError unless unit, commutativity, duality, associativity hold."""
        t = self._t
        r = self.rank
        assert (t[self.unit] == np.eye(r, dtype=np.int64)).all(), "unit law fails"
        assert (t == t.transpose(1, 0, 2)).all(), "commutativity fails"
        for a in range(r):
            col = t[a, :, self.unit]
            assert col.sum() == 1 and col[self.dual[a]] == 1, "duality fails"
        lhs = np.einsum("abe,ecd->abcd", t, t)
        rhs = np.einsum("bcf,afd->abcd", t, t)
        assert (lhs == rhs).all(), "associativity fails"

    # -- Frobenius-Perron dimensions -------------------------------------------

    def fpdim_object(self, a: int, tol: float = 1e-12, max_iter: int = 100_000) -> float:
        """Largest eigenvalue of the fusion matrix by power iteration (all-ones seed)."""
        m = self._t[a].astype(float)
        # Shift keeps the iteration aperiodic; the top eigenvalue moves by +1.
        m = m + np.eye(self.rank)
        v = np.ones(self.rank)
        lam = 0.0
        for _ in range(max_iter):
            w = m @ v
            lam = float(np.linalg.norm(w))
            v_next = w / lam
            if float(np.linalg.norm(m @ v_next - lam * v_next)) < tol:
                return lam - 1.0
            v = v_next
        raise RuntimeError(f"power iteration did not converge for object {self.simples[a]}")

    def fpdim_category(self) -> float:
        return float(sum(self.fpdim_object(a) ** 2 for a in range(self.rank)))

    # -- restriction and serialization -----------------------------------------

    def restrict(self, members) -> FusionRing:
        """Sub-ring on a fusion-closed subset of simple indices."""
        members = sorted(members)
        pos = {a: i for i, a in enumerate(members)}
        coeffs = {}
        for i, a in enumerate(members):
            for j, b in enumerate(members):
                if j < i:
                    continue
                for c, v in self.fuse(a, b):
                    if c not in pos:
                        raise ValueError("subset is not fusion-closed")
                    coeffs[(i, j, pos[c])] = v
        return FusionRing([self.simples[a] for a in members], pos[self.unit], coeffs)

    def to_json(self) -> dict:
        coeffs = []
        r = self.rank
        for a in range(r):
            for b in range(a, r):
                for c in range(r):
                    v = self.N(a, b, c)
                    if v:
                        coeffs.append([a, b, c, v])
        return {"simples": [str(s) for s in self.simples], "unit": self.unit, "coeffs": coeffs}

    @staticmethod
    def from_json(obj: dict) -> FusionRing:
        coeffs = {(a, b, c): v for a, b, c, v in obj["coeffs"]}
        return FusionRing(tuple(obj["simples"]), int(obj["unit"]), coeffs)


@lru_cache(maxsize=None)
def minimal_model_ring(p: int, q: int) -> FusionRing:
    """The fusion ring of the (p,q) category over canonical Kac labels."""
    model = MinimalModel(p, q)
    simples = model.list_simples()
    pos = {s: i for i, s in enumerate(simples)}
    coeffs: dict[tuple[int, int, int], int] = {}
    for i, a in enumerate(simples):
        for j in range(i, len(simples)):
            for c in fuse(model, a, simples[j]):
                coeffs[(i, j, pos[c])] = 1
    return FusionRing(simples, pos[model.canonical(1, 1)], coeffs)
