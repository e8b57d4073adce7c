"""Curvature recursion for the jet tower of a surface.

Level ``s`` of the tower carries a fiber coordinate ``x_s = |v_s^1|^2`` in
[0, 1].  Diagonal curvature coefficients are propagated one level up by the
2x2 transfer matrix ``R_s T``; products of these matrices give the functions
alpha, beta, gamma, delta from which every eigenvalue of the curvature of
``O_{X_k}(a)`` is assembled.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import MultiPoly, to_fraction

CORRECTED = "corrected"  # alpha_{0,1} = 1, beta_{0,1} = 0 (default)
LITERAL = "literal"  # alpha_{0,1} = beta_{0,1} = 1, as printed
CONVENTIONS = (CORRECTED, LITERAL)


def xvar(s: int) -> str:
    return f"x{s}"


def avar(j: int) -> str:
    return f"a{j}"


def x_context(k: int) -> tuple[str, ...]:
    """Fiber variables x_1..x_{k-1} of the order-k tower."""
    return tuple(xvar(s) for s in range(1, k))


def a_context(k: int) -> tuple[str, ...]:
    return tuple(avar(j) for j in range(1, k + 1))


@dataclass(frozen=True)
class WeightVector:
    """Weights (a_1, ..., a_k); ``a`` is None for fully symbolic weights."""

    a: tuple | None
    k: int

    @classmethod
    def of(cls, values: Sequence) -> WeightVector:
        vals = tuple(to_fraction(v) for v in values)
        if not vals:
            raise ValueError("weight vector must be nonempty")
        return cls(vals, len(vals))

    @classmethod
    def symbolic(cls, k: int) -> WeightVector:
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(None, k)

    @property
    def is_symbolic(self) -> bool:
        return self.a is None

    def context(self) -> tuple[str, ...]:
        """Variable context of every polynomial built from these weights."""
        if self.is_symbolic:
            return x_context(self.k) + a_context(self.k)
        return x_context(self.k)

    def coeff(self, j: int) -> MultiPoly:
        """a_j as a polynomial (constant or the variable a_j)."""
        ctx = self.context()
        if self.is_symbolic:
            return MultiPoly.var(avar(j), ctx)
        return MultiPoly.const(self.a[j - 1], ctx)

    def __str__(self):
        if self.is_symbolic:
            return f"({', '.join(a_context(self.k))})"
        return "(" + ", ".join(str(v) for v in self.a) + ")"


def as_weight(a) -> WeightVector:
    return a if isinstance(a, WeightVector) else WeightVector.of(a)


@dataclass(frozen=True)
class TransferMatrix:
    """R_p T ... R_q T = [[delta, gamma], [beta, alpha]] over x_q..x_p."""

    p: int
    q: int
    alpha: MultiPoly
    beta: MultiPoly
    gamma: MultiPoly
    delta: MultiPoly

    def rows(self):
        return ((self.delta, self.gamma), (self.beta, self.alpha))

    def determinant(self) -> MultiPoly:
        return self.delta * self.alpha - self.gamma * self.beta

    def at(self, point) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return tuple(tuple(e.evaluate(point) for e in row) for row in self.rows())


_base_cache: dict[int, tuple[MultiPoly, ...]] = {}
_cache_lock = threading.Lock()


def _base_product(n: int) -> tuple[MultiPoly, ...]:
    """Entries (delta, gamma, beta, alpha) of R_n T ... R_1 T over x_1..x_n."""
    with _cache_lock:
        hit = _base_cache.get(n)
    if hit is not None:
        return hit
    ctx = tuple(xvar(s) for s in range(1, n + 1))
    one = MultiPoly.const(1, ctx)
    # start from the identity and multiply on the left by R_s T
    m11, m12, m21, m22 = one, MultiPoly.zero(ctx), MultiPoly.zero(ctx), one
    for s in range(1, n + 1):
        x = MultiPoly.var(xvar(s), ctx)
        # R_s T = [[1-x, 2x-1], [x, 1-2x]]
        r11, r12, r21, r22 = 1 - x, 2 * x - 1, x, 1 - 2 * x
        m11, m12, m21, m22 = (
            r11 * m11 + r12 * m21,
            r11 * m12 + r12 * m22,
            r21 * m11 + r22 * m21,
            r21 * m12 + r22 * m22,
        )
    entries = (m11, m12, m21, m22)
    with _cache_lock:
        _base_cache.setdefault(n, entries)
    return entries


def transfer_matrix(p: int, q: int) -> TransferMatrix:
    if q < 1 or p < q:
        raise ValueError(f"transfer_matrix needs p >= q >= 1, got p={p}, q={q}")
    n = p - q + 1
    shift = {xvar(i): xvar(i + q - 1) for i in range(1, n + 1)}
    d, g, b, a = (e.rename(shift) for e in _base_product(n))
    return TransferMatrix(p, q, alpha=a, beta=b, gamma=g, delta=d)


def y(p: int, q: int) -> MultiPoly:
    """alpha_{p,q} - beta_{p,q} over x_q..x_p; y(0, 1) = 1 by convention."""
    if p == 0 and q == 1:
        return MultiPoly.const(1, ())
    t = transfer_matrix(p, q)
    return t.alpha - t.beta


def w(p: int, q: int) -> MultiPoly:
    """alpha_{p,q} + beta_{p,q}; w(0, 1) = 1 by convention."""
    if p == 0 and q == 1:
        return MultiPoly.const(1, ())
    t = transfer_matrix(p, q)
    return t.alpha + t.beta


def theta(k: int, s: int, a) -> MultiPoly:
    """Vertical eigenvalue a_s + sum_{j=s}^{k-1} a_{j+1} y_{j,s}, for 1 <= s <= k-1.

    The result lives in the context of the weight vector (x_1..x_{k-1}, plus
    a_1..a_k for symbolic weights).
    """
    a = as_weight(a)
    if a.k != k:
        raise ValueError(f"weight has length {a.k}, expected {k}")
    if not 1 <= s <= k - 1:
        raise ValueError(f"theta index s={s} out of range 1..{k - 1}")
    ctx = a.context()
    out = a.coeff(s)
    for j in range(s, k):
        out = out + a.coeff(j + 1) * y(j, s).embed(ctx)
    return out


def vertical(k: int, a) -> list[MultiPoly]:
    """theta_1..theta_{k-1} followed by the constant a_k."""
    a = as_weight(a)
    return [theta(k, s, a) for s in range(1, k)] + [a.coeff(k)]


def _boundary(convention: str) -> tuple[int, int]:
    if convention == CORRECTED:
        return 1, 0
    if convention == LITERAL:
        return 1, 1
    raise ValueError(f"unknown boundary convention {convention!r}; expected one of {CONVENTIONS}")


def horizontal_pair(k: int, a, convention: str = CORRECTED) -> tuple[MultiPoly, MultiPoly]:
    """(Al, B) with Al = sum a_{l+1} alpha_{l,1}, B = sum a_{l+1} beta_{l,1}."""
    a = as_weight(a)
    if a.k != k:
        raise ValueError(f"weight has length {a.k}, expected {k}")
    alpha0, beta0 = _boundary(convention)
    ctx = a.context()
    al = a.coeff(1) * alpha0
    b = a.coeff(1) * beta0
    for l in range(1, k):
        t = transfer_matrix(l, 1)
        al = al + a.coeff(l + 1) * t.alpha.embed(ctx)
        b = b + a.coeff(l + 1) * t.beta.embed(ctx)
    return al, b


DVAR = "D"


@dataclass(frozen=True)
class CurvatureProfile:
    k: int
    weight: WeightVector
    vertical: tuple  # theta_1..theta_{k-1}, then a_k
    al: MultiPoly
    b: MultiPoly
    horiz_trace: MultiPoly
    horiz_det: MultiPoly  # context + ("D",)
    convention: str = CORRECTED

    @property
    def context(self) -> tuple[str, ...]:
        return self.weight.context()

    def det_at(self, d) -> MultiPoly:
        out = self.horiz_det.evaluate({DVAR: d})
        return out if isinstance(out, MultiPoly) else MultiPoly.const(out, self.context)


def curvature_profile(k: int, a, convention: str = CORRECTED) -> CurvatureProfile:
    a = as_weight(a)
    if k < 1:
        raise ValueError("k must be >= 1")
    al, b = horizontal_pair(k, a, convention)
    ctx = a.context()
    dctx = ctx + (DVAR,)
    d = MultiPoly.var(DVAR, dctx)
    al_d, b_d = al.embed(dctx), b.embed(dctx)
    det = al_d * b_d + d * (al_d - b_d) ** 2
    return CurvatureProfile(
        k=k,
        weight=a,
        vertical=tuple(vertical(k, a)),
        al=al,
        b=b,
        horiz_trace=al + b,
        horiz_det=det,
        convention=convention,
    )


def conjugation_step(c_prev: Sequence, x, phase=0.0) -> tuple:
    """Push the diagonal pair (c_11, c_22) one level up the tower.

    The unitary frame change uses v_s = (sqrt(x), sqrt(1-x)) completed to a
    unitary matrix with a free phase.  For ``phase`` equal to 0 or pi and
    rational inputs the result is an exact Fraction pair; any other phase is
    evaluated in complex floating point.
    """
    c11, c22 = c_prev
    exact = phase in (0, math.pi) and all(
        isinstance(v, (int, Fraction)) for v in (c11, c22, x)
    )
    if exact:
        x = to_fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"fiber coordinate x={x} outside [0, 1]")
    # gamma^{(s)} for the (1,1) and (2,2) fiber indices
    g11, g22 = c11 - c22, c22
    if exact:
        e = 1 if phase == 0 else -1
        # |a_{la}|^2 with a_11 = -e v2, a_12 = e v1, a_21 = conj v1, a_22 = conj v2
        mod = ((e * e * (1 - x), e * e * x), (x, 1 - x))
        return tuple(g11 * mod[l][0] + g22 * mod[l][1] for l in range(2))
    v1 = math.sqrt(float(x))
    v2 = math.sqrt(1.0 - float(x))
    u = cmath.exp(1j * phase)
    amat = ((-u * v2, u * v1), (v1, v2))
    gam = ((float(g11), 0.0), (0.0, float(g22)))
    out = []
    for lam in range(2):
        acc = 0j
        for al in range(2):
            for be in range(2):
                acc += gam[al][be] * amat[lam][al].conjugate() * amat[lam][be]
        out.append(acc.real)
    return tuple(out)
