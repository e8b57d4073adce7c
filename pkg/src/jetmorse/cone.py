"""The weight cone, theta positivity, and lower bounds for sup F_k / G_k.

Cone membership: a_j >= 2 (a_{j+1} + ... + a_k) for j < k and a_k >= 0.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chern import IntersectionForm, intersection_polynomials
from .exact import to_fraction
from .recursion import as_weight, theta, x_context

INTERIOR, BOUNDARY, OUTSIDE = "interior", "boundary", "outside"


def cone_slacks(a: Sequence) -> list[Fraction]:
    """a_j - 2 sum_{l>j} a_l for j < k, then a_k."""
    a = [to_fraction(v) for v in a]
    out = []
    running = sum(a[1:], Fraction(0))
    for j in range(len(a) - 1):
        out.append(a[j] - 2 * running)
        running -= a[j + 1]
    out.append(a[-1])
    return out


def cone_contains(a: Sequence) -> str:
    slacks = cone_slacks(a)
    if any(s < 0 for s in slacks):
        return OUTSIDE
    if any(s == 0 for s in slacks):
        return BOUNDARY
    return INTERIOR


def from_slacks(slacks: Sequence) -> tuple[Fraction, ...]:
    """Inverse of :func:`cone_slacks`."""
    slacks = [to_fraction(s) for s in slacks]
    a = [slacks[-1]]
    tail = slacks[-1]
    for s in reversed(slacks[:-1]):
        v = s + 2 * tail
        a.append(v)
        tail += v
    return tuple(reversed(a))


@dataclass(frozen=True)
class PositivityCertificate:
    positive: bool
    vertex: tuple | None = None  # minimizing vertex over all thetas
    s: int | None = None
    value: Fraction | None = None

    def __bool__(self):
        return self.positive


def theta_positivity_certificate(k: int, a) -> PositivityCertificate:
    """Check every vertical eigenvalue at all vertices of its cube.

    theta_s^k is multilinear in x_s..x_{k-1}, so its minimum over the cube
    sits at a vertex; theta_k^k is the constant a_k (a single vertex).
    Returns the overall minimizing (s, vertex, value); ``positive`` is True
    iff that minimum is > 0.
    """
    w = as_weight(a)
    if w.k != k:
        raise ValueError(f"weight has length {w.k}, expected {k}")
    ctx = x_context(k)
    worst = None
    for s in range(1, k):
        t = theta(k, s, w)
        free = ctx[s - 1 :]
        for vert in itertools.product((0, 1), repeat=len(free)):
            point = dict.fromkeys(ctx, Fraction(0))
            point.update(zip(free, map(Fraction, vert)))
            v = t.evaluate(point)
            if worst is None or v < worst[2]:
                worst = (s, vert, v)
    if worst is None or w.a[-1] < worst[2]:
        worst = (k, (), w.a[-1])
    s, vert, v = worst
    return PositivityCertificate(v > 0, vert, s, v)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 6
    seed: int = 0
    max_iters: int = 60
    initial_step: Fraction = Fraction(1)
    min_step: Fraction = Fraction(1, 64)


@dataclass(frozen=True)
class MkRecord:
    k: int
    best_ratio: Fraction
    argmax: tuple
    certified_lower_bound: Fraction
    seeds_used: tuple = field(default=(), compare=False)
    inherited_from: int | None = None  # k-1 when the bound comes from the lift


def canonical_seed(k: int) -> tuple[Fraction, ...]:
    """(1), (2, 1), (6, 2, 1), (18, 6, 2, 1), ...: the tight point of the cone."""
    return from_slacks([0] * (k - 1) + [1]) if k > 1 else (Fraction(1),)


def _ratio(form: IntersectionForm, a) -> Fraction | None:
    f, g = form.at(a)
    if g <= 0:
        return None
    return f / g


def _better(r1, a1, r2, a2) -> bool:
    # maximize ratio; ties go to the lexicographically smallest weight
    if r2 is None:
        return r1 is not None
    if r1 is None:
        return False
    return r1 > r2 or (r1 == r2 and tuple(a1) < tuple(a2))


def _coordinate_search(form: IntersectionForm, slacks: list[Fraction], cfg: OptimizerConfig):
    k = len(slacks)
    best_a = from_slacks(slacks)
    best = _ratio(form, best_a)
    step = cfg.initial_step
    it = 0
    while step >= cfg.min_step and it < cfg.max_iters:
        improved = False
        for j in range(k - 1):  # a_k stays normalized to 1
            for sign in (1, -1):
                trial = list(slacks)
                trial[j] = trial[j] + sign * step
                if trial[j] < 0:
                    continue
                a = from_slacks(trial)
                r = _ratio(form, a)
                it += 1
                if _better(r, a, best, best_a):
                    slacks, best, best_a = trial, r, a
                    improved = True
                    break
        if not improved:
            step /= 2
    return best, best_a


def maximize_ratio(
    k: int,
    config: OptimizerConfig | None = None,
    form: IntersectionForm | None = None,
    previous: MkRecord | None = None,
) -> MkRecord:
    """Best exact ratio F_k/G_k found on the cone slice a_k = 1.

    The search is seeded with the canonical tight weight and ``restarts``
    random slack vectors; each start runs coordinate ascent on the slacks with
    dyadic step halving.  When ``previous`` (the record for k-1) is given and
    beats the search, its bound is inherited: F_k/G_k at (a, t) tends to
    F_{k-1}/G_{k-1}(a) as t -> 0.
    """
    cfg = config or OptimizerConfig()
    form = form or intersection_polynomials(k)
    rng = random.Random(cfg.seed * 1009 + k)
    starts = [[Fraction(0)] * (k - 1) + [Fraction(1)]]
    if previous is not None and k > 1:
        # lift the previous argmax: (N a_prev, 1) with large N sits near (a_prev, 0)
        prev_slacks = cone_slacks(previous.argmax)
        starts.append([s * 64 for s in prev_slacks] + [Fraction(1)])
    for _ in range(cfg.restarts):
        starts.append([Fraction(rng.randint(0, 16), 4) for _ in range(k - 1)] + [Fraction(1)])
    best, best_a = None, None
    seeds = []
    for st in starts:
        seeds.append(from_slacks(st))
        r, a = _coordinate_search(form, st, cfg)
        if _better(r, a, best, best_a):
            best, best_a = r, a
    if best is None:
        raise ValueError(f"G_{k} is nonpositive at every probe; no ratio available")
    certified, inherited = best, None
    if previous is not None and previous.certified_lower_bound > best:
        certified, inherited = previous.certified_lower_bound, k - 1
    return MkRecord(k, best, best_a, certified, tuple(seeds), inherited)


def mk_table(kmax: int, config: OptimizerConfig | None = None) -> list[MkRecord]:
    out: list[MkRecord] = []
    prev = None
    for k in range(1, kmax + 1):
        prev = maximize_ratio(k, config, previous=prev)
        out.append(prev)
    return out


@dataclass(frozen=True)
class SurfaceInvariants:
    c1sq: Fraction
    c2: Fraction
    name: str = ""

    @classmethod
    def of(cls, c1sq, c2, name: str = "") -> SurfaceInvariants:
        return cls(to_fraction(c1sq), to_fraction(c2), name)

    @classmethod
    def hypersurface(cls, d: int) -> SurfaceInvariants:
        """Smooth degree-d surface in P^3 (adjunction formulas)."""
        if d < 5:
            raise ValueError("hypersurfaces of degree < 5 are not of general type")
        return cls(Fraction(d * (d - 4) ** 2), Fraction(d * (d * d - 4 * d + 6)), f"degree-{d} hypersurface")

    @property
    def ratio(self) -> Fraction:
        return self.c2 / self.c1sq

    def satisfies_bmy(self) -> bool:
        return self.c1sq <= 3 * self.c2

    def is_ball_quotient_like(self) -> bool:
        return self.c1sq == 3 * self.c2


@dataclass(frozen=True)
class JetOrderReport:
    surface: SurfaceInvariants
    order: int | None
    witness: MkRecord | None
    table: tuple


def jet_order_for_surface(
    s: SurfaceInvariants,
    kmax: int,
    config: OptimizerConfig | None = None,
    table: Sequence[MkRecord] | None = None,
) -> JetOrderReport:
    if s.c1sq <= 0:
        raise ValueError("c1sq must be positive (minimal surface of general type)")
    table = list(table) if table is not None else mk_table(kmax, config)
    target = s.ratio
    for rec in table[:kmax]:
        if rec.certified_lower_bound > target:
            return JetOrderReport(s, rec.k, rec, tuple(table))
    return JetOrderReport(s, None, None, tuple(table))
