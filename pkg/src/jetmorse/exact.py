"""Exact rational arithmetic and sparse multivariate polynomials.

Rationals are plain :class:`fractions.Fraction` values.  ``MultiPoly`` stores a
map from exponent tuples to nonzero Fractions over an explicit, ordered tuple
of variable names.  Nothing in here ever touches floating point.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

Rational = Fraction


class ContextError(ValueError):
    """Raised when polynomials over different variable contexts are combined."""


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact values; pass a Fraction or a string")
    return Fraction(value)


def format_rational(q) -> str:
    q = to_fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    # decimal strings like "2.5" are exact decimals, never binary floats
    return Fraction(text)


class MultiPoly:
    """Immutable sparse polynomial with Fraction coefficients.

    >>> x = MultiPoly.var("x", ("x",))
    >>> (1 - 3 * x) * (Fraction(2, 9) - x / 3)
    MultiPoly(('x',), x^2 - x + 2/9)
    """

    __slots__ = ("vars", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ContextError(f"duplicate variable names in {self.vars}")
        n = len(self.vars)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != n:
                raise ContextError(f"exponent {exp} does not match arity {n} of {self.vars}")
            c = to_fraction(c)
            if c:
                clean[exp] = c
        self._terms = clean
        self._hash = None

    # -- construction -------------------------------------------------------

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> MultiPoly:
        # terms already cleaned: exact arity, no zeros, Fraction values
        p = object.__new__(cls)
        p.vars = variables
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, variables: Sequence[str]) -> MultiPoly:
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, value, variables: Sequence[str]) -> MultiPoly:
        variables = tuple(variables)
        value = to_fraction(value)
        return cls._raw(variables, {(0,) * len(variables): value} if value else {})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> MultiPoly:
        variables = tuple(variables)
        if name not in variables:
            raise ContextError(f"{name!r} not in context {variables}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exp: Fraction(1)})

    @classmethod
    def gens(cls, variables: Sequence[str]) -> tuple[MultiPoly, ...]:
        return tuple(cls.var(v, variables) for v in variables)

    # -- basic accessors ----------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items(), reverse=True)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * len(self.vars), Fraction(0))

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def degree(self, var: str | None = None) -> int:
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        i = self._index(var)
        return max(e[i] for e in self._terms)

    def is_multilinear(self) -> bool:
        return all(x <= 1 for e in self._terms for x in e)

    def free_vars(self) -> tuple[str, ...]:
        used = [False] * len(self.vars)
        for e in self._terms:
            for i, x in enumerate(e):
                if x:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise ContextError(f"{var!r} not in context {self.vars}") from None

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ContextError(f"context mismatch: {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw(self.vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly._raw(self.vars, out)

    __rmul__ = __mul__

    def scale(self, c) -> MultiPoly:
        c = to_fraction(c)
        if not c:
            return MultiPoly.zero(self.vars)
        return MultiPoly._raw(self.vars, {e: v * c for e, v in self._terms.items()})

    def __truediv__(self, c):
        if isinstance(c, MultiPoly):
            return NotImplemented
        return self.scale(1 / to_fraction(c))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- equality -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # -- calculus and evaluation --------------------------------------------

    def evaluate(self, point: Mapping[str, object]):
        """Substitute rational values.  A full assignment returns a Fraction;
        a partial one returns a MultiPoly in the remaining variables."""
        for name in point:
            self._index(name)
        values = [to_fraction(point[v]) if v in point else None for v in self.vars]
        if all(v is not None for v in values):
            total = Fraction(0)
            for e, c in self._terms.items():
                t = c
                for v, x in zip(values, e):
                    if x:
                        t *= v**x
                total += t
            return total
        keep = [i for i, v in enumerate(values) if v is None]
        out: dict = {}
        for e, c in self._terms.items():
            t = c
            for v, x in zip(values, e):
                if v is not None and x:
                    t *= v**x
            if not t:
                continue
            ne = tuple(e[i] for i in keep)
            s = out.get(ne, 0) + t
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
        return MultiPoly._raw(tuple(self.vars[i] for i in keep), out)

    def __call__(self, **point):
        return self.evaluate(point)

    def partial_derivative(self, var: str) -> MultiPoly:
        i = self._index(var)
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[ne] = c * e[i]
        return MultiPoly._raw(self.vars, out)

    def antiderivative(self, var: str) -> MultiPoly:
        i = self._index(var)
        out = {}
        for e, c in self._terms.items():
            ne = e[:i] + (e[i] + 1,) + e[i + 1 :]
            out[ne] = c / (e[i] + 1)
        return MultiPoly._raw(self.vars, out)

    def integrate_box(self, bounds: Mapping[str, tuple]):
        """Definite integral over an axis-aligned box.

        ``bounds`` maps variable names to ``(lo, hi)``; ``lo > hi`` gives the
        signed integral.  Integrating every variable returns a Fraction,
        otherwise a MultiPoly over the remaining variables.
        """
        idx = {self._index(v): (to_fraction(lo), to_fraction(hi)) for v, (lo, hi) in bounds.items()}
        keep = [i for i in range(len(self.vars)) if i not in idx]
        out: dict = {}
        for e, c in self._terms.items():
            t = c
            for i, (lo, hi) in idx.items():
                n = e[i] + 1
                t *= (hi**n - lo**n) / n
                if not t:
                    break
            if not t:
                continue
            ne = tuple(e[i] for i in keep)
            s = out.get(ne, 0) + t
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
        rest = MultiPoly._raw(tuple(self.vars[i] for i in keep), out)
        if not keep:
            return rest.constant_value()
        return rest

    def substitute(self, mapping: Mapping[str, MultiPoly], variables: Sequence[str]) -> MultiPoly:
        """Replace variables by polynomials over ``variables``; variables not
        mapped must themselves belong to ``variables``."""
        variables = tuple(variables)
        images = []
        for v in self.vars:
            if v in mapping:
                img = mapping[v]
                if not isinstance(img, MultiPoly):
                    img = MultiPoly.const(img, variables)
                elif img.vars != variables:
                    raise ContextError(f"image of {v} lives in {img.vars}, expected {variables}")
            else:
                img = MultiPoly.var(v, variables)
            images.append(img)
        powers: list[dict] = [{0: MultiPoly.const(1, variables)} for _ in images]

        def power(i, n):
            cache = powers[i]
            if n not in cache:
                cache[n] = power(i, n - 1) * images[i]
            return cache[n]

        total = MultiPoly.zero(variables)
        for e, c in self._terms.items():
            t = MultiPoly.const(c, variables)
            for i, x in enumerate(e):
                if x:
                    t = t * power(i, x)
            total = total + t
        return total

    # -- context management -------------------------------------------------

    def embed(self, variables: Sequence[str]) -> MultiPoly:
        """Re-express over a larger (or reordered) context."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        pos = []
        for v in self.vars:
            if v not in variables:
                raise ContextError(f"cannot embed {self.vars} into {variables}: {v!r} missing")
            pos.append(variables.index(v))
        n = len(variables)
        out = {}
        for e, c in self._terms.items():
            ne = [0] * n
            for p, x in zip(pos, e):
                ne[p] = x
            out[tuple(ne)] = c
        return MultiPoly._raw(variables, out)

    def restrict(self, variables: Sequence[str]) -> MultiPoly:
        """Drop unused variables; raises if a dropped variable occurs."""
        variables = tuple(variables)
        for v in set(self.vars) - set(variables):
            if self.degree(v) > 0:
                raise ContextError(f"{v!r} occurs in the polynomial and cannot be dropped")
        keep = []
        for v in variables:
            if v not in self.vars:
                raise ContextError(f"{v!r} not in context {self.vars}")
            keep.append(self.vars.index(v))
        out = {tuple(e[i] for i in keep): c for e, c in self._terms.items()}
        return MultiPoly._raw(variables, out)

    def rename(self, mapping: Mapping[str, str]) -> MultiPoly:
        return MultiPoly._raw(tuple(mapping.get(v, v) for v in self.vars), dict(self._terms))

    # -- serialization ------------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [{"exp": list(e), "coef": format_rational(c)} for e, c in self.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_json_obj(cls, obj: dict) -> MultiPoly:
        terms = {}
        for t in obj["terms"]:
            exp = tuple(int(x) for x in t["exp"])
            if exp in terms:
                raise ValueError(f"duplicate exponent {exp} in serialized polynomial")
            terms[exp] = parse_rational(t["coef"])
        return cls(obj["vars"], terms)

    @classmethod
    def from_json(cls, text: str) -> MultiPoly:
        return cls.from_json_obj(json.loads(text))

    # -- display ------------------------------------------------------------

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                v if x == 1 else f"{v}^{x}" for v, x in zip(self.vars, e) if x
            )
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"MultiPoly({self.vars}, {self})"


def multinomial(exps: Iterable[int]) -> int:
    total, out = 0, 1
    for e in exps:
        total += e
        out *= comb(total, e)
    return out


def box_vertices(box: Sequence[tuple]) -> Iterable[tuple]:
    return itertools.product(*box)
