"""Exact S- and T-data: kernel S-matrix, quantum dimensions, Verlinde numbers, FS exponents.

The exact kernel stores entries (-1)^(1+m*n'+n*m') * sin(pi*q*m*m'/p) * sin(pi*p*n*n'/q);
the nonzero scalar sqrt(8/pq) is dropped there (it affects neither ranks nor the
proportionality tests) and reinstated in the float matrix.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exactmath
from .exactmath import CycloNumber, ExactMatrix, make_sin, _context
from .fusion import FusionRing, minimal_model_ring
from .minimal_model import KacLabel, MinimalModel


class InternalInvariantError(RuntimeError):
    """Two independent exact methods disagreed; signals a bug, not bad input."""


def _entry_sign(a: KacLabel, b: KacLabel) -> int:
    return -1 if (1 + a.m * b.n + a.n * b.m) % 2 else 1


class ModularData:
    """All modular data of one minimal model, built once and then read-only."""

    def __init__(self, model: MinimalModel):
        self.model = model
        self.simples = model.list_simples()
        self.index = {s: i for i, s in enumerate(self.simples)}
        p, q = model.p, model.q
        self.N = math.lcm(4, 2 * p, 2 * q)
        self._ctx = _context(self.N)
        self.c = model.central_charge()
        self.h = tuple(model.conformal_weight(s) for s in self.simples)
        self.h_mod1 = tuple(x % 1 for x in self.h)
        self.theta = tuple(model.twist(s) for s in self.simples)
        self.fsexp = self.fsexp_of(range(len(self.simples)))
        self._kernel_vec = self._build_kernel_vectors()
        # Minimal-weight channel: the Perron-Frobenius-positive column of S.
        # For the unitary series this is the vacuum itself.
        self.mu = min(range(len(self.h)), key=lambda i: self.h[i])
        self.S_float = self._build_float()

    # -- construction ----------------------------------------------------------

    def _build_kernel_vectors(self) -> list[list[list[int]]]:
        """4x the kernel entry as integer coefficient vectors in Q(zeta_N)."""
        p, q, n = self.model.p, self.model.q, self.N
        ctx = self._ctx
        d = ctx.d

        def four_sin_sin(u: int, ub: int, v: int, vb: int) -> list[int]:
            # 4*sin(u*pi/ub)*sin(v*pi/vb) = -z^(a+b) + z^(a-b) + z^(b-a) - z^(-a-b)
            a = u * (n // (2 * ub))
            b = v * (n // (2 * vb))
            vec = [0] * d
            for e, s in (((a + b), -1), ((a - b), 1), ((-a + b), 1), ((-a - b), -1)):
                row = ctx.row(e % n)
                for k, rc in enumerate(row):
                    if rc:
                        vec[k] += s * rc
            return vec

        out = []
        r = len(self.simples)
        for i in range(r):
            row = []
            a = self.simples[i]
            for j in range(r):
                b = self.simples[j]
                sgn = _entry_sign(a, b)
                vec = four_sin_sin(q * a.m * b.m, p, p * a.n * b.n, q)
                row.append([sgn * x for x in vec] if sgn < 0 else vec)
            out.append(row)
        return out

    def _build_float(self) -> np.ndarray:
        p, q = self.model.p, self.model.q
        r = len(self.simples)
        s = np.empty((r, r))
        scale = math.sqrt(8.0 / (p * q))
        for i, a in enumerate(self.simples):
            for j, b in enumerate(self.simples):
                s[i, j] = (
                    _entry_sign(a, b)
                    * math.sin(math.pi * q * a.m * b.m / p)
                    * math.sin(math.pi * p * a.n * b.n / q)
                )
        s *= scale
        # Fix the global sign so the minimal-weight column is positive; this
        # keeps quantum dimensions positive without spoiling (ST)^3 = S^2.
        if s[0, self.mu] < 0:
            s = -s
        s.setflags(write=False)
        return s

    # -- exact kernel ------------------------------------------------------------

    def s_entry(self, a: KacLabel, b: KacLabel) -> tuple[CycloNumber, float]:
        """Exact kernel entry (scalar dropped) and the normalized float entry."""
        a = self.model.canonical_label(a)
        b = self.model.canonical_label(b)
        sgn = _entry_sign(a, b)
        p, q = self.model.p, self.model.q
        kernel = sgn * make_sin(q * a.m * b.m, p) * make_sin(p * a.n * b.n, q)
        return kernel, float(self.S_float[self.index[a], self.index[b]])

    def kernel_matrix(self, members=None) -> ExactMatrix:
        idx = sorted(members) if members is not None else range(len(self.simples))
        quarter = Fraction(1, 4)
        rows = []
        for i in idx:
            row = []
            for j in idx:
                vec = self._kernel_vec[i][j]
                coeffs = {e: quarter * c for e, c in enumerate(vec) if c}
                row.append(CycloNumber(self.N, coeffs, _canonical=True))
            rows.append(row)
        return ExactMatrix(rows)

    def exact_rank_of(self, members=None) -> int:
        """Rank of the restricted kernel matrix, by fraction-free elimination."""
        idx = sorted(members) if members is not None else list(range(len(self.simples)))
        rows = [[list(self._kernel_vec[i][j]) for j in idx] for i in idx]
        return exactmath._bareiss_rank(self._ctx, rows)

    def float_rank_of(self, members=None, tol: float = 1e-8) -> int:
        idx = sorted(members) if members is not None else list(range(len(self.simples)))
        sub = self.S_float[np.ix_(idx, idx)]
        sv = np.linalg.svd(sub, compute_uv=False)
        return int((sv > tol).sum())

    def is_transparent_exact(self, x: int, members) -> bool:
        """Exact S-criterion: S(x,y) S(0,0) = S(0,x) S(0,y) for every y in members."""
        ctx = self._ctx
        K = self._kernel_vec
        u = self.index[self.model.canonical(1, 1)]
        lhs_fixed = K[u][u]
        for y in members:
            lhs = exactmath.vec_mul(ctx, K[x][y], lhs_fixed)
            rhs = exactmath.vec_mul(ctx, K[u][x], K[u][y])
            if lhs != rhs:
                return False
        return True

    def center_exact(self, members) -> frozenset[int]:
        members = sorted(members)
        return frozenset(x for x in members if self.is_transparent_exact(x, members))

    # -- float data ----------------------------------------------------------------

    def qdim(self, a: int) -> float:
        """Quantum dimension as the S-ratio in the minimal-weight channel.

        Coincides with S[0,a]/S[0,0] for the unitary series; using the
        minimal-weight column keeps the value positive and equal to the
        Frobenius-Perron dimension for every coprime pair.
        """
        return float(self.S_float[a, self.mu] / self.S_float[0, self.mu])

    def global_dim(self) -> float:
        return float(sum(self.qdim(a) ** 2 for a in range(len(self.simples))))

    def t_float(self) -> np.ndarray:
        """Diagonal of exp(2*pi*i*(h - c/24)), used only in the numeric (st)^3 check."""
        ph = [cmath_exp(float(h - self.c / 24)) for h in self.h]
        return np.diag(ph)

    def verlinde_coeff(self, a: int, b: int, c: int, tol: float = 1e-6) -> int:
        s = self.S_float
        val = float(np.sum(s[a] * s[b] * s[c] / s[0]))
        r = round(val)
        if abs(val - r) >= tol:
            raise ArithmeticError(f"Verlinde sum {val} too far from an integer")
        return r

    def verlinde_tensor(self, tol: float = 1e-6) -> np.ndarray:
        s = self.S_float
        t = np.einsum("ax,bx,cx->abc", s, s, s / s[0])
        r = np.rint(t)
        if float(np.abs(t - r).max()) >= tol:
            raise ArithmeticError("Verlinde tensor too far from integers")
        return r.astype(np.int64)

    # -- twists ---------------------------------------------------------------------

    def fsexp_of(self, members) -> int:
        """Order of the twist diagonal: lcm of denominators of h mod 1."""
        out = 1
        for i in members:
            out = math.lcm(out, self.h_mod1[i].denominator)
        return out

    # -- export -----------------------------------------------------------------------

    def to_json(self) -> dict:
        ring = minimal_model_ring(self.model.p, self.model.q)
        return {
            "p": self.model.p,
            "q": self.model.q,
            "c": exactmath.format_rational(self.c),
            "simples": [
                {"m": s.m, "n": s.n, "h": exactmath.format_rational(self.h[i])}
                for i, s in enumerate(self.simples)
            ],
            "S_float": [[_f12(x) for x in row] for row in self.S_float],
            "theta": [exactmath.format_rational(x) for x in self.h_mod1],
            "fsexp": self.fsexp,
            "fusion": ring.to_json(),
        }


def _f12(x: float) -> float:
    return float(f"{x:.12g}")


def cmath_exp(h: float) -> complex:
    return complex(math.cos(2 * math.pi * h), math.sin(2 * math.pi * h))


@lru_cache(maxsize=None)
def modular_data(p: int, q: int) -> ModularData:
    return ModularData(MinimalModel(p, q))
