"""Chern ring of the jet tower X_k -> X_{k-1} -> ... -> X over a surface.

Generators are u_j = c_1(O_{X_j}(1)) (degree 1), c_1 (degree 1) and c_2
(degree 2) of the surface.  Each level is the projectivized rank-2 bundle
V_{j-1}, so u_j satisfies

    u_j^2 + c_1(V_{j-1}) u_j + c_2(V_{j-1}) = 0,

and the Chern classes of V_j follow from the two defining exact sequences:
c_1(V_j) = c_1(V_{j-1}) + u_j and c_2(V_j) = -c_1(V_{j-1}) u_j - 2 u_j^2.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .exact import MultiPoly
from .recursion import a_context, avar

C1, C2 = "c1", "c2"


def tower_context(k: int) -> tuple[str, ...]:
    return tuple(f"u{j}" for j in range(1, k + 1)) + (C1, C2)


def _weights(k: int) -> tuple[int, ...]:
    return (1,) * k + (1, 2)


def _truncate(p: MultiPoly, k: int) -> MultiPoly:
    """Drop monomials above dim X_k = k + 2 and pullbacks of degree > 2 from X."""
    wts = _weights(k)
    top = k + 2
    keep = {}
    for e, c in p.terms.items():
        if sum(w * x for w, x in zip(wts, e)) > top:
            continue
        if e[-2] + 2 * e[-1] > 2:
            continue
        keep[e] = c
    return MultiPoly(p.vars, keep)


@dataclass(frozen=True)
class TowerRingElement:
    """A class on X_k, stored as a polynomial in u_1..u_k, c_1, c_2."""

    poly: MultiPoly
    level: int

    @classmethod
    def of(cls, poly: MultiPoly, level: int) -> TowerRingElement:
        return cls(_truncate(poly.embed(tower_context(level)), level), level)

    @classmethod
    def gen(cls, name: str, level: int) -> TowerRingElement:
        return cls(MultiPoly.var(name, tower_context(level)), level)

    def _other(self, other) -> MultiPoly:
        if isinstance(other, TowerRingElement):
            if other.level != self.level:
                raise ValueError(f"level mismatch {self.level} vs {other.level}")
            return other.poly
        return other

    def __add__(self, other):
        return TowerRingElement(self.poly + self._other(other), self.level)

    __radd__ = __add__

    def __sub__(self, other):
        return TowerRingElement(self.poly - self._other(other), self.level)

    def __neg__(self):
        return TowerRingElement(-self.poly, self.level)

    def __mul__(self, other):
        return TowerRingElement(_truncate(self.poly * self._other(other), self.level), self.level)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = TowerRingElement(MultiPoly.const(1, self.poly.vars), self.level)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, TowerRingElement):
            return self.level == other.level and self.poly == other.poly
        return NotImplemented

    def __hash__(self):
        return hash((self.level, self.poly))

    def lift(self, level: int) -> TowerRingElement:
        """Pull back to a higher level of the tower."""
        if level < self.level:
            raise ValueError("can only pull back to a higher level")
        return TowerRingElement.of(self.poly, level)

    def __str__(self):
        return str(self.poly)


_chern_lock = threading.Lock()


@lru_cache(maxsize=None)
def _chern_of_level(k: int) -> tuple[MultiPoly, MultiPoly]:
    ctx = tower_context(k)
    if k == 0:
        return MultiPoly.var(C1, ctx), MultiPoly.var(C2, ctx)
    c1_prev, _ = _chern_of_level(k - 1)
    c1_prev = c1_prev.embed(ctx)
    u = MultiPoly.var(f"u{k}", ctx)
    return c1_prev + u, -c1_prev * u - 2 * u * u


def chern_of_level(k: int) -> tuple[TowerRingElement, TowerRingElement]:
    """(c_1(V_k), c_2(V_k)) as classes on X_k; level 0 gives (c_1, c_2) of T_X."""
    if k < 0:
        raise ValueError("k must be >= 0")
    with _chern_lock:
        c1, c2 = _chern_of_level(k)
    return TowerRingElement.of(c1, k), TowerRingElement.of(c2, k)


def _relation(j: int, k: int) -> MultiPoly:
    """u_j^2 expressed through lower terms, in the context of level k."""
    c1_prev, c2_prev = _chern_of_level(j - 1)
    ctx = tower_context(k)
    u = MultiPoly.var(f"u{j}", ctx)
    return -c1_prev.embed(ctx) * u - c2_prev.embed(ctx)


def reduce(e: TowerRingElement) -> TowerRingElement:
    """Normal form: every u_j appears to power at most one.

    Repeatedly rewrites u_j^2 at the highest offending level; the top-level
    exponent vector decreases lexicographically so this terminates.
    """
    k = e.level
    rels = {j: _relation(j, k) for j in range(1, k + 1)}
    ctx = tower_context(k)
    poly = _truncate(e.poly, k)
    while True:
        done, todo = {}, []
        for exp, c in poly.terms.items():
            hit = next((j for j in range(k, 0, -1) if exp[j - 1] >= 2), None)
            if hit is None:
                done[exp] = c
            else:
                todo.append((exp, c, hit))
        if not todo:
            return TowerRingElement(poly, k)
        acc = MultiPoly(ctx, done)
        for exp, c, j in todo:
            lowered = list(exp)
            lowered[j - 1] -= 2
            acc = acc + _truncate(MultiPoly(ctx, {tuple(lowered): c}) * rels[j], k)
        poly = _truncate(acc, k)


def top_class(e: TowerRingElement) -> tuple[Fraction, Fraction]:
    """Degree of a top-dimensional class: (coefficient of c_1^2, of c_2).

    The value is x c_1^2 + y c_2 for the returned pair (x, y).
    """
    k = e.level
    n = reduce(e).poly
    ones = (1,) * k
    return n.coefficient(ones + (2, 0)), n.coefficient(ones + (0, 1))


# -- pushforward along the tower --------------------------------------------

@lru_cache(maxsize=None)
def _fiber_power(j: int, n: int) -> tuple[MultiPoly, MultiPoly]:
    """u_j^n = P + Q u_j with P, Q pulled back from X_{j-1}."""
    ctx = tower_context(j - 1)
    if n == 0:
        return MultiPoly.const(1, ctx), MultiPoly.zero(ctx)
    p, q = _fiber_power(j, n - 1)
    s1, s2 = _chern_of_level(j - 1)
    return _truncate(-q * s2, j - 1), _truncate(p - q * s1, j - 1)


@lru_cache(maxsize=None)
def _push_monomial(exp: tuple) -> tuple[Fraction, Fraction]:
    """Degree of u^e c_1^f c_2^g on X_j (j = len(exp) - 2)."""
    j = len(exp) - 2
    if j == 0:
        f, g = exp
        if (f, g) == (2, 0):
            return Fraction(1), Fraction(0)
        if (f, g) == (0, 1):
            return Fraction(0), Fraction(1)
        return Fraction(0), Fraction(0)
    # pi_*(beta u_j^n) = beta Q_n, since pi_* u_j = 1 and pi_* 1 = 0
    _, q = _fiber_power(j, exp[j - 1])
    rest = MultiPoly(tower_context(j - 1), {exp[: j - 1] + exp[j:]: 1})
    x = y = Fraction(0)
    for e, c in _truncate(rest * q, j - 1).terms.items():
        dx, dy = _push_monomial(e)
        x += c * dx
        y += c * dy
    return x, y


def push_to_point(e: TowerRingElement) -> tuple[Fraction, Fraction]:
    """Same result as :func:`top_class`, computed by fiber integration."""
    x = y = Fraction(0)
    for exp, c in e.poly.terms.items():
        dx, dy = _push_monomial(exp)
        x += c * dx
        y += c * dy
    return x, y


@dataclass(frozen=True)
class IntersectionForm:
    """(a_1 u_1 + ... + a_k u_k)^{k+2} = F(a) c_1^2 - G(a) c_2."""

    k: int
    F: MultiPoly
    G: MultiPoly

    def at(self, a) -> tuple[Fraction, Fraction]:
        point = {avar(j): v for j, v in enumerate(a, start=1)}
        return self.F.evaluate(point), self.G.evaluate(point)

    def ratio(self, a) -> Fraction | None:
        f, g = self.at(a)
        return None if g == 0 else f / g


_ip_cache: dict[int, IntersectionForm] = {}


def intersection_polynomials(k: int) -> IntersectionForm:
    """Expand (sum a_j u_j)^{k+2} by the multinomial theorem and integrate
    each u-monomial down the tower."""
    if k < 1:
        raise ValueError("k must be >= 1")
    with _chern_lock:
        hit = _ip_cache.get(k)
    if hit is not None:
        return hit
    n = k + 2
    fterms, gterms = {}, {}
    fact = factorial(n)
    for e in _compositions(n, k):
        coef = fact
        for x in e:
            coef //= factorial(x)
        dx, dy = _push_monomial(e + (0, 0))
        if dx:
            fterms[e] = coef * dx
        if dy:
            gterms[e] = -coef * dy
    ctx = a_context(k)
    form = IntersectionForm(k, MultiPoly(ctx, fterms), MultiPoly(ctx, gterms))
    with _chern_lock:
        _ip_cache.setdefault(k, form)
    return form


def _compositions(n: int, parts: int):
    if parts == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def linear_form(a, k: int | None = None) -> TowerRingElement:
    """a_1 u_1 + ... + a_k u_k on X_k for numeric weights."""
    k = len(a) if k is None else k
    ctx = tower_context(k)
    p = MultiPoly.zero(ctx)
    for j, v in enumerate(a, start=1):
        p = p + MultiPoly.var(f"u{j}", ctx) * Fraction(v)
    return TowerRingElement(p, k)


def self_intersection(a) -> tuple[Fraction, Fraction]:
    """(F(a), G(a)) from reducing (a . u)^{k+2} in the ring directly."""
    k = len(a)
    x, y = top_class(linear_form(a) ** (k + 2))
    return x, -y


__all__ = [
    "TowerRingElement",
    "IntersectionForm",
    "chern_of_level",
    "reduce",
    "top_class",
    "push_to_point",
    "intersection_polynomials",
    "self_intersection",
    "linear_form",
    "tower_context",
]
