"""Exact rational and cyclotomic arithmetic, plus exact linear algebra.

Cyclotomic numbers are stored as residues modulo the N-th cyclotomic
polynomial, so two values are equal as complex numbers exactly when their
representations coincide.  Matrix ranks are computed by fraction-free
(Bareiss) elimination; the exact divisions stay inside the ring by
multiplying with the product of Galois conjugates of the previous pivot
and dividing by its (rational) norm, so no field inversion is needed.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

Rational = Fraction

#: Tolerance for all float cross-checks against exact values.
FLOAT_TOL = 1e-9


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, low to high."""
    if n < 1:
        raise ValueError("modulus must be positive")
    # X^n - 1 divided by the product of all lower cyclotomic polynomials.
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_exact_div(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _poly_exact_div(num: list[int], den: tuple[int, ...]) -> list[int]:
    num = list(num)
    dn = len(den) - 1
    lead = den[-1]
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q, r = divmod(c, lead)
        if r:
            raise ArithmeticError("non-exact polynomial division")
        quot[i - dn] = q
        for j, dc in enumerate(den):
            num[i - dn + j] -= q * dc
    if any(num):
        raise ArithmeticError("nonzero remainder in polynomial division")
    return quot


class _Context:
    """Per-modulus reduction tables for arithmetic in Q[X]/(Phi_n)."""

    __slots__ = ("n", "d", "phi", "_rows", "_units")

    def __init__(self, n: int):
        self.n = n
        self.phi = cyclotomic_polynomial(n)
        self.d = len(self.phi) - 1
        self._rows: list[tuple[int, ...] | None] = [None] * n
        row0 = [0] * self.d
        row0[0] = 1
        self._rows[0] = tuple(row0)
        self._units: tuple[int, ...] | None = None

    def row(self, e: int) -> tuple[int, ...]:
        """Canonical coefficients of X^e (0 <= e < n) modulo Phi_n."""
        cached = self._rows[e]
        if cached is not None:
            return cached
        # Fill sequentially from the highest already-known power.
        start = e
        while self._rows[start] is None:
            start -= 1
        cur = list(self._rows[start])
        d, phi = self.d, self.phi
        for k in range(start + 1, e + 1):
            top = cur[d - 1]
            cur = [0] + cur[: d - 1]
            if top:
                for i in range(d):
                    if phi[i]:
                        cur[i] -= top * phi[i]
            self._rows[k] = tuple(cur)
        return self._rows[e]  # type: ignore[return-value]

    @property
    def units(self) -> tuple[int, ...]:
        if self._units is None:
            self._units = tuple(j for j in range(1, self.n) if math.gcd(j, self.n) == 1)
            if self.n == 1:
                self._units = (1,)
        return self._units


@lru_cache(maxsize=None)
def _context(n: int) -> _Context:
    return _Context(n)


def _reduce_poly(ctx: _Context, conv: list) -> list:
    """Reduce a polynomial (coefficient list, any length) mod X^n-1 and Phi_n."""
    n, d = ctx.n, ctx.d
    if len(conv) > n:
        folded = conv[:n]
        for e in range(n, len(conv)):
            folded[e - n] += conv[e]
        conv = folded
    acc = list(conv[:d]) + [0] * (d - min(d, len(conv)))
    for e in range(d, len(conv)):
        t = conv[e]
        if t:
            row = ctx.row(e)
            for k, rc in enumerate(row):
                if rc:
                    acc[k] += t * rc
    return acc


class CycloNumber:
    """An exact element of Q(zeta_N), N-th root of unity zeta_N = exp(2*pi*i/N).

    Stored canonically: a sparse map exponent -> Fraction with all exponents
    below deg(Phi_N), i.e. the residue modulo the N-th cyclotomic polynomial.
    Instances are immutable; arithmetic between different moduli promotes both
    operands into the compositum Q(zeta_lcm).
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict[int, Fraction], *, _canonical: bool = False):
        self.n = n
        if _canonical:
            self.coeffs = coeffs
            return
        ctx = _context(n)
        dense = [Fraction(0)] * (2 * ctx.d - 1 if coeffs else 1)
        for e, c in coeffs.items():
            e %= n
            if e < ctx.d:
                dense[e] += c
            else:
                row = ctx.row(e)
                for k, rc in enumerate(row):
                    if rc:
                        dense[k] += c * rc
        self.coeffs = {e: c for e, c in enumerate(dense[: ctx.d]) if c}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int = 1) -> CycloNumber:
        return CycloNumber(n, {}, _canonical=True)

    @staticmethod
    def from_rational(x: Fraction | int, n: int = 1) -> CycloNumber:
        x = Fraction(x)
        return CycloNumber(n, {0: x} if x else {}, _canonical=True)

    @staticmethod
    def root_of_unity(n: int, k: int = 1) -> CycloNumber:
        return CycloNumber(n, {k % n: Fraction(1)})

    # -- ring operations ----------------------------------------------------

    def promote(self, n: int) -> CycloNumber:
        if n == self.n:
            return self
        if n % self.n:
            raise ValueError(f"cannot embed Q(zeta_{self.n}) into Q(zeta_{n})")
        scale = n // self.n
        return CycloNumber(n, {e * scale: c for e, c in self.coeffs.items()})

    def _pair(self, other: CycloNumber) -> tuple[CycloNumber, CycloNumber]:
        if self.n == other.n:
            return self, other
        m = math.lcm(self.n, other.n)
        return self.promote(m), other.promote(m)

    def __add__(self, other) -> CycloNumber:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return CycloNumber(a.n, out, _canonical=True)

    __radd__ = __add__

    def __neg__(self) -> CycloNumber:
        return CycloNumber(self.n, {e: -c for e, c in self.coeffs.items()}, _canonical=True)

    def __sub__(self, other) -> CycloNumber:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> CycloNumber:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> CycloNumber:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        if not a.coeffs or not b.coeffs:
            return CycloNumber.zero(a.n)
        prod: dict[int, Fraction] = {}
        for e1, c1 in a.coeffs.items():
            for e2, c2 in b.coeffs.items():
                e = e1 + e2
                prod[e] = prod.get(e, Fraction(0)) + c1 * c2
        return CycloNumber(a.n, prod)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CycloNumber:
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = CycloNumber.from_rational(1, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(e == 0 for e in self.coeffs)

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("value is not rational")
        return self.coeffs.get(0, Fraction(0))

    def conjugate(self, j: int = -1) -> CycloNumber:
        """Galois conjugate zeta -> zeta^j (default complex conjugation)."""
        j %= self.n
        if math.gcd(j, self.n) != 1:
            raise ValueError("conjugation exponent must be a unit mod N")
        return CycloNumber(self.n, {(e * j) % self.n: c for e, c in self.coeffs.items()})

    def float_eval(self) -> complex:
        tau = 2.0 * math.pi / self.n
        out = 0j
        for e, c in self.coeffs.items():
            out += float(c) * cmath.exp(1j * tau * e)
        return out

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"N": self.n, "coeffs": {str(e): format_rational(c) for e, c in sorted(self.coeffs.items())}}

    @staticmethod
    def from_json(obj: dict) -> CycloNumber:
        return CycloNumber(int(obj["N"]), {int(k): parse_rational(v) for k, v in obj["coeffs"].items()})

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Cyclo(0)"
        terms = " + ".join(f"{c}*z{self.n}^{e}" for e, c in sorted(self.coeffs.items()))
        return f"Cyclo({terms})"


def _coerce(x) -> CycloNumber:
    if isinstance(x, CycloNumber):
        return x
    if isinstance(x, (int, Fraction)):
        return CycloNumber.from_rational(x)
    return NotImplemented


def make_sin(a: int, b: int) -> CycloNumber:
    """Exact sin(a*pi/b) as an element of Q(zeta_lcm(4, 2b))."""
    if b < 1:
        raise ValueError("denominator must be positive")
    n = math.lcm(4, 2 * b)
    s = n // (2 * b)
    # sin(x) = (e^{ix} - e^{-ix}) / (2i)  with  1/(2i) = -zeta_4/2.
    plus = CycloNumber.root_of_unity(n, a * s)
    minus = CycloNumber.root_of_unity(n, -a * s)
    i4 = CycloNumber.root_of_unity(n, n // 4)
    return (plus - minus) * i4 * Fraction(-1, 2)


def make_cos(a: int, b: int) -> CycloNumber:
    """Exact cos(a*pi/b), i.e. sin shifted by a quarter turn."""
    if b < 1:
        raise ValueError("denominator must be positive")
    n = math.lcm(4, 2 * b)
    s = n // (2 * b)
    plus = CycloNumber.root_of_unity(n, a * s)
    minus = CycloNumber.root_of_unity(n, -a * s)
    return (plus + minus) * Fraction(1, 2)


def cyclo_is_zero(x: CycloNumber) -> bool:
    return x.is_zero()


def float_eval(x: CycloNumber) -> complex:
    return x.float_eval()


class ExactMatrix:
    """Dense matrix over Q(zeta_N); all entries share one modulus."""

    __slots__ = ("rows", "cols", "n", "entries")

    def __init__(self, entries: list[list[CycloNumber]]):
        if not entries or not entries[0]:
            raise ValueError("matrix must be non-empty")
        self.rows = len(entries)
        self.cols = len(entries[0])
        if any(len(r) != self.cols for r in entries):
            raise ValueError("ragged matrix")
        n = 1
        for row in entries:
            for x in row:
                n = math.lcm(n, x.n)
        self.n = n
        self.entries = [[x.promote(n) for x in row] for row in entries]

    def transpose(self) -> ExactMatrix:
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def _int_rows(self) -> list[list[list[int]]]:
        """Entries as integer coefficient vectors, denominators cleared per row."""
        ctx = _context(self.n)
        d = ctx.d
        out = []
        for row in self.entries:
            den = 1
            for x in row:
                for c in x.coeffs.values():
                    den = den * c.denominator // math.gcd(den, c.denominator)
            vecs = []
            for x in row:
                v = [0] * d
                for e, c in x.coeffs.items():
                    v[e] = int(c * den)
                vecs.append(v)
            out.append(vecs)
        return out

    def rank(self) -> int:
        return _bareiss_rank(_context(self.n), self._int_rows())


def exact_rank(m: ExactMatrix) -> int:
    """Rank over Q(zeta_N) by fraction-free elimination with exact divisions."""
    return m.rank()


# -- integer-vector kernel used by ExactMatrix.rank and modular_data ---------


def vec_is_zero(v: list[int]) -> bool:
    return not any(v)


def vec_mul(ctx: _Context, u: list[int], v: list[int]) -> list[int]:
    d = ctx.d
    conv = [0] * (2 * d - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                if b:
                    conv[i + j] += a * b
    return _reduce_poly(ctx, conv)


def _vec_conj(ctx: _Context, v: list[int], j: int) -> list[int]:
    acc = [0] * ctx.d
    for e, a in enumerate(v):
        if a:
            row = ctx.row((e * j) % ctx.n)
            for k, rc in enumerate(row):
                if rc:
                    acc[k] += a * rc
    return acc


def _conj_product_and_norm(ctx: _Context, v: list[int]) -> tuple[list[int], int]:
    """Product of the nontrivial Galois conjugates of v, and the norm v*w in Z."""
    w = None
    for j in ctx.units:
        if j == 1:
            continue
        cj = _vec_conj(ctx, v, j)
        w = cj if w is None else vec_mul(ctx, w, cj)
    if w is None:  # degree-1 field: the norm is the value itself
        w = [1] + [0] * (ctx.d - 1)
    nv = vec_mul(ctx, v, w)
    if any(nv[1:]):
        raise ArithmeticError("norm computation left the rationals")
    return w, nv[0]


def _fused_update(ctx: _Context, p: list[int], e: list[int], a: list[int], b: list[int]) -> list[int]:
    """p*e - a*b with a single reduction pass."""
    d = ctx.d
    conv = [0] * (2 * d - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(e):
                if y:
                    conv[i + j] += x * y
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    conv[i + j] -= x * y
    return _reduce_poly(ctx, conv)


def _bareiss_rank(ctx: _Context, rows: list[list[list[int]]]) -> int:
    """Fraction-free elimination over Z[zeta_N]; first-nonzero pivot selection."""
    if not rows:
        return 0
    nrows, ncols = len(rows), len(rows[0])
    prev_w: list[int] | None = None  # conjugate product of previous pivot
    prev_n = 1
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if not vec_is_zero(rows[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            low = rows[i][c]
            if vec_is_zero(low):
                # Bareiss still rescales untouched rows to keep minors exact.
                for j in range(c + 1, ncols):
                    upd = vec_mul(ctx, piv, rows[i][j])
                    rows[i][j] = _exact_div(ctx, upd, prev_w, prev_n)
            else:
                for j in range(c + 1, ncols):
                    upd = _fused_update(ctx, piv, rows[i][j], low, rows[r][j])
                    rows[i][j] = _exact_div(ctx, upd, prev_w, prev_n)
                rows[i][c] = [0] * ctx.d
        r += 1
        if r == nrows:
            break
        prev_w, prev_n = _conj_product_and_norm(ctx, piv)
    return r


def _exact_div(ctx: _Context, u: list[int], w: list[int] | None, n: int) -> list[int]:
    if w is None or n == 1:
        return u
    prod = vec_mul(ctx, u, w)
    out = []
    for c in prod:
        if c % n:
            raise ArithmeticError("non-exact division in elimination")
        out.append(c // n)
    return out
