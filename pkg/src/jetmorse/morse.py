"""Holomorphic Morse integrals of O_{X_k}(a).

The top power of the curvature factors as (k+2)! times the product of the
vertical eigenvalues theta_1..theta_{k-1}, a_k and the determinant of the
2x2 horizontal block.  Integrating the horizontal block over X_1 uses two
normalizations: the plain fiber volume ``c1sq / 2`` and the D-weighted one
``(c1sq - c2) / 6``.  Every fiber coordinate x_s carries Lebesgue measure on
[0, 1].
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

from .chern import IntersectionForm
from .exact import MultiPoly, to_fraction
from .recursion import (
    CORRECTED,
    DVAR,
    WeightVector,
    a_context,
    as_weight,
    avar,
    curvature_profile,
    horizontal_pair,
    theta,
    x_context,
)

log = logging.getLogger(__name__)


def ball_quotient_D(c1sq=None, c2=None) -> Fraction:
    """D from equating (c1sq - c2)/6 with D * c1sq/2.

    Without arguments the ball-quotient equality c1sq = 3 c2 is used.
    """
    if c2 is None:
        c2 = Fraction(1)
    if c1sq is None:
        c1sq = 3 * to_fraction(c2)
    c1sq, c2 = to_fraction(c1sq), to_fraction(c2)
    if c1sq == 0:
        raise ValueError("c1sq must be nonzero")
    return ((c1sq - c2) / 6) / (c1sq / 2)


@dataclass(frozen=True)
class SurfaceModel:
    c1sq: Fraction
    c2: Fraction
    D: Fraction | None = None
    name: str = "custom"

    @classmethod
    def ball(cls) -> SurfaceModel:
        # only the ratio c2 / c1sq matters; fix c2 = 1
        return cls(Fraction(3), Fraction(1), ball_quotient_D(), "ball")

    @property
    def J0(self) -> Fraction:
        return self.c1sq / 2

    @property
    def JD(self) -> Fraction:
        return (self.c1sq - self.c2) / 6


@dataclass(frozen=True)
class MorseNormalization:
    J0: Fraction
    JD: Fraction

    @classmethod
    def for_model(cls, model: SurfaceModel) -> MorseNormalization:
        return cls(model.J0, model.JD)


def integrate_product(factors: Sequence[MultiPoly], order: Sequence[str]) -> MultiPoly:
    """Integrate a product of polynomials over [0,1] in each variable of
    ``order``, multiplying in each factor only once its variables come up."""
    pending = list(factors)
    ctx = pending[0].vars
    acc = MultiPoly.const(1, ctx)
    for v in order:
        keep = []
        for f in pending:
            if f.degree(v) > 0:
                acc = acc * f
            else:
                keep.append(f)
        pending = keep
        acc = acc.integrate_box({v: (0, 1)})
        acc = acc.embed(ctx) if isinstance(acc, MultiPoly) else MultiPoly.const(acc, ctx)
    for f in pending:
        acc = acc * f
    return acc


def fiber_integrals(k: int, a, convention: str = CORRECTED) -> tuple[MultiPoly, MultiPoly]:
    """(P, Q) = (int Al B prod theta, int (Al - B)^2 prod theta) over [0,1]^{k-1}."""
    a = as_weight(a)
    al, b = horizontal_pair(k, a, convention)
    thetas = [theta(k, s, a) for s in range(1, k)]
    order = x_context(k)
    p = integrate_product([al * b] + thetas, order)
    q = integrate_product([(al - b) ** 2] + thetas, order)
    return p, q


def fg_via_integrals(k: int, a=None, convention: str = CORRECTED):
    """F_k, G_k from the curvature integrals.

    With ``a`` None (or a symbolic WeightVector) the result is an
    IntersectionForm of polynomials in a_1..a_k; for numeric weights it is
    the pair (F(a), G(a)) of Fractions.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    w = WeightVector.symbolic(k) if a is None else as_weight(a)
    p, q = fiber_integrals(k, w, convention)
    scale = factorial(k + 2) * w.coeff(k)
    f = scale * (p / 2 + q / 6)
    g = scale * (q / 6)
    if w.is_symbolic:
        ctx = a_context(k)
        return IntersectionForm(k, f.restrict(ctx), g.restrict(ctx))
    return f.constant_value(), g.constant_value()


# -- eigenvalue signs ---------------------------------------------------------


@dataclass(frozen=True)
class Degenerate:
    """Some curvature eigenvalue vanishes exactly at the probed point."""

    which: str

    def __str__(self):
        return f"degenerate({self.which})"


def _horizontal_negatives(det: Fraction, trace: Fraction):
    if det > 0:
        return 0 if trace > 0 else 2
    if det < 0:
        return 1
    return None


@dataclass(frozen=True)
class _Signed:
    """Numeric weights with the sign-relevant polynomials of one order k."""

    k: int
    weight: WeightVector
    thetas: tuple
    a_k: Fraction
    det: MultiPoly
    trace: MultiPoly
    integrand: MultiPoly  # factor * prod theta * det
    factor: Fraction  # (k+2)! a_k J0 / c1sq

    @classmethod
    def build(cls, k, a, model: SurfaceModel, convention=CORRECTED) -> _Signed:
        a = as_weight(a)
        if a.is_symbolic:
            raise ValueError("restricted integrals need numeric weights")
        if a.k != k:
            raise ValueError(f"weight has length {a.k}, expected {k}")
        if model.D is None:
            raise ValueError("restricted integrals need a constant-D model")
        prof = curvature_profile(k, a, convention)
        det = prof.det_at(model.D)
        thetas = tuple(prof.vertical[:-1])
        prod = MultiPoly.const(1, prof.context)
        for t in thetas:
            prod = prod * t
        a_k = a.a[-1]
        factor = factorial(k + 2) * a_k * model.J0 / model.c1sq
        return cls(k, a, thetas, a_k, det, prof.horiz_trace, prod * det * factor, factor)

    def count_at(self, point: dict):
        if self.a_k == 0:
            return Degenerate(f"a{self.k}")
        neg = 1 if self.a_k < 0 else 0
        for s, t in enumerate(self.thetas, start=1):
            v = t.evaluate(point)
            if v == 0:
                return Degenerate(f"theta{s}")
            neg += v < 0
        h = _horizontal_negatives(self.det.evaluate(point), self.trace.evaluate(point))
        if h is None:
            return Degenerate("det")
        return neg + h


def negativity_count(k: int, a, model: SurfaceModel, x: Sequence = (), convention=CORRECTED):
    """Number of negative curvature eigenvalues at fiber point ``x``.

    Returns an int in 0..k+2, or a :class:`Degenerate` marker when some
    eigenvalue is exactly zero.
    """
    sig = _Signed.build(k, a, model, convention)
    x = tuple(to_fraction(v) for v in x)
    if len(x) != k - 1:
        raise ValueError(f"need {k - 1} fiber coordinates, got {len(x)}")
    for v in x:
        if not 0 <= v <= 1:
            raise ValueError(f"fiber coordinate {v} outside [0, 1]")
    return sig.count_at(dict(zip(x_context(k), x)))


# -- exact 1-D path -----------------------------------------------------------


def _rational_roots(p: MultiPoly) -> list[Fraction] | None:
    """Real roots of a univariate polynomial of degree <= 2, or None if some
    root is irrational."""
    if not p:
        return []
    (v,) = p.vars
    deg = p.degree()
    c = [p.coefficient((i,)) for i in range(deg + 1)]
    if deg <= 0:
        return []
    if deg == 1:
        return [-c[0] / c[1]]
    if deg == 2:
        a2, a1, a0 = c[2], c[1], c[0]
        disc = a1 * a1 - 4 * a2 * a0
        if disc < 0:
            return []
        rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
        if rn * rn != disc.numerator or rd * rd != disc.denominator:
            return None
        sq = Fraction(rn, rd)
        return sorted({(-a1 - sq) / (2 * a2), (-a1 + sq) / (2 * a2)})
    raise ValueError("only degree <= 2 supported")


def _exact_1d(sig: _Signed, qmax: int):
    """Exact restricted integral for k = 2.  Returns (value, region_volume) or
    None if a breakpoint is irrational."""
    cuts = {Fraction(0), Fraction(1)}
    for p in (*sig.thetas, sig.det, sig.trace):
        roots = _rational_roots(p)
        if roots is None:
            return None
        cuts.update(r for r in roots if 0 < r < 1)
    cuts = sorted(cuts)
    value, volume = Fraction(0), Fraction(0)
    var = x_context(sig.k)[0]
    for lo, hi in zip(cuts, cuts[1:]):
        count = sig.count_at({var: (lo + hi) / 2})
        if isinstance(count, Degenerate) or count > qmax:
            continue
        value += sig.integrand.integrate_box({var: (lo, hi)})
        volume += hi - lo
    return value, volume


# -- adaptive box subdivision ---------------------------------------------------


class QuadratureError(RuntimeError):
    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


def _poly_range(p: MultiPoly, box: Sequence[tuple]) -> tuple[Fraction, Fraction]:
    """Rigorous enclosure of p over the box.

    Multilinear polynomials are exact via vertices; otherwise the polynomial
    is re-centered at the box midpoint and bounded term by term.
    """
    if p.is_constant():
        v = p.constant_value()
        return v, v
    if p.is_multilinear():
        vals = [p.evaluate(dict(zip(p.vars, v))) for v in itertools.product(*box)]
        return min(vals), max(vals)
    ctx = p.vars
    mapping = {}
    for v, (lo, hi) in zip(ctx, box):
        mid, rad = (lo + hi) / 2, (hi - lo) / 2
        mapping[v] = MultiPoly.const(mid, ctx) + MultiPoly.var(v, ctx) * rad
    centered = p.substitute(mapping, ctx)
    lo = hi = Fraction(0)
    for e, c in centered.terms.items():
        if not any(e):
            lo += c
            hi += c
        elif all(x % 2 == 0 for x in e):
            # t^e ranges over [0, 1]
            if c > 0:
                hi += c
            else:
                lo += c
        else:
            lo -= abs(c)
            hi += abs(c)
    return lo, hi


def _interval_mul(x, y):
    prods = (x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1])
    return min(prods), max(prods)


@dataclass
class QuadratureResult:
    estimate: float
    error_bound: float
    lower: Fraction
    upper: Fraction
    boxes: int
    region_volume: float
    volume_lower: Fraction = field(repr=False, default=Fraction(0))
    volume_upper: Fraction = field(repr=False, default=Fraction(0))

    def contains(self, value) -> bool:
        return self.lower <= to_fraction(value) <= self.upper


class _BoxIntegrator:
    def __init__(self, sig: _Signed, qmax: int):
        self.sig = sig
        self.qmax = qmax
        self.vars = x_context(sig.k)
        anti = sig.integrand
        for v in self.vars:
            anti = anti.antiderivative(v)
        self.anti = anti

    def exact(self, box) -> Fraction:
        # inclusion-exclusion of the full antiderivative over the box corners
        total = Fraction(0)
        n = len(box)
        for corner in itertools.product((0, 1), repeat=n):
            pt = {v: box[i][corner[i]] for i, v in enumerate(self.vars)}
            sign = -1 if (n - sum(corner)) % 2 else 1
            total += sign * self.anti.evaluate(pt)
        return total

    def classify(self, box):
        """Return ('in' | 'out' | 'mixed', integrand enclosure or None)."""
        sig = self.sig
        base = 1 if sig.a_k < 0 else 0
        lo_count = hi_count = base
        ranges = []
        for t in sig.thetas:
            r = _poly_range(t, box)
            ranges.append(r)
            if r[1] < 0:
                lo_count += 1
                hi_count += 1
            elif r[0] <= 0:
                hi_count += 1
        d = _poly_range(sig.det, box)
        ranges.append(d)
        if d[0] > 0:
            # det > 0 forces trace != 0, so the trace sign is constant on the box
            mid = {v: (lo + hi) / 2 for v, (lo, hi) in zip(self.vars, box)}
            h = 0 if sig.trace.evaluate(mid) > 0 else 2
            lo_count += h
            hi_count += h
        elif d[1] < 0:
            lo_count += 1
            hi_count += 1
        else:
            tr = _poly_range(sig.trace, box)
            hi_count += 2 if tr[0] <= 0 else 1
            lo_count += 1 if tr[1] < 0 else 0
        if hi_count <= self.qmax:
            return "in", None
        if lo_count > self.qmax:
            return "out", None
        enc = (sig.factor, sig.factor)
        for r in ranges:
            enc = _interval_mul(enc, r)
        return "mixed", enc


def _box_volume(box) -> Fraction:
    v = Fraction(1)
    for lo, hi in box:
        v *= hi - lo
    return v


def _split(box):
    # bisect the widest side; ties go to the lowest index for determinism
    widths = [hi - lo for lo, hi in box]
    i = widths.index(max(widths))
    lo, hi = box[i]
    mid = (lo + hi) / 2
    left = list(box)
    right = list(box)
    left[i] = (lo, mid)
    right[i] = (mid, hi)
    return tuple(left), tuple(right)


def adaptive_integral(sig: _Signed, qmax: int, tol, max_boxes: int = 200_000) -> QuadratureResult:
    """Deterministic subdivision: boxes whose eigenvalue signs are settled are
    integrated exactly; undecided boxes contribute an enclosure and are split
    in order of enclosure width until the total half-width is <= tol."""
    tol = to_fraction(tol) if not isinstance(tol, float) else Fraction(tol)
    integ = _BoxIntegrator(sig, qmax)
    n = len(integ.vars)
    root = tuple((Fraction(0), Fraction(1)) for _ in range(n))
    settled = Fraction(0)
    vol_in = Fraction(0)
    heap: list = []
    pending_lo = pending_hi = Fraction(0)
    pending_vol = Fraction(0)
    counter = itertools.count()
    best_lo, best_hi = None, None
    boxes = 0

    def push(box):
        nonlocal settled, vol_in, pending_lo, pending_hi, pending_vol, boxes
        boxes += 1
        kind, enc = integ.classify(box)
        if kind == "in":
            settled += integ.exact(box)
            vol_in += _box_volume(box)
        elif kind == "mixed":
            vol = _box_volume(box)
            lo = vol * min(Fraction(0), enc[0])
            hi = vol * max(Fraction(0), enc[1])
            pending_lo += lo
            pending_hi += hi
            pending_vol += vol
            heapq.heappush(heap, (-(hi - lo), next(counter), box, lo, hi, vol))

    push(root)
    while True:
        lo_total, hi_total = settled + pending_lo, settled + pending_hi
        # running intersection keeps successive enclosures nested
        best_lo = lo_total if best_lo is None else max(best_lo, lo_total)
        best_hi = hi_total if best_hi is None else min(best_hi, hi_total)
        if (best_hi - best_lo) / 2 <= tol or not heap:
            break
        if boxes >= max_boxes:
            raise QuadratureError(
                f"tolerance {float(tol):.3g} not reached within {max_boxes} boxes; "
                f"achieved {float((best_hi - best_lo) / 2):.3g}",
                best_lo,
                best_hi,
            )
        _, _, box, lo, hi, vol = heapq.heappop(heap)
        pending_lo -= lo
        pending_hi -= hi
        pending_vol -= vol
        for child in _split(box):
            push(child)
    mid = (best_lo + best_hi) / 2
    return QuadratureResult(
        estimate=float(mid),
        error_bound=float((best_hi - best_lo) / 2),
        lower=best_lo,
        upper=best_hi,
        boxes=boxes,
        region_volume=float(vol_in + pending_vol / 2),
        volume_lower=vol_in,
        volume_upper=vol_in + pending_vol,
    )


@dataclass
class MorseResult:
    k: int
    weight: tuple
    model: str
    qmax: int
    value: Fraction | None = None
    quadrature: QuadratureResult | None = None
    region_volume: Fraction | float | None = None

    @property
    def exact(self) -> bool:
        return self.value is not None

    def as_float(self) -> float:
        return float(self.value) if self.exact else self.quadrature.estimate


def restricted_morse_integral(
    k: int,
    a,
    model: SurfaceModel | None = None,
    qmax: int = 1,
    tol=Fraction(1, 1000),
    convention: str = CORRECTED,
    max_boxes: int = 200_000,
) -> MorseResult:
    """Coefficient of c_1^2 in the Morse integral over {negativity <= qmax}."""
    model = SurfaceModel.ball() if model is None else model
    w = as_weight(a)
    sig = _Signed.build(k, w, model, convention)
    res = MorseResult(k, tuple(w.a), model.name, qmax)
    if sig.a_k == 0:
        res.value, res.region_volume = Fraction(0), Fraction(0)
        return res
    if k == 1:
        count = sig.count_at({})
        inside = not isinstance(count, Degenerate) and count <= qmax
        res.value = sig.integrand.constant_value() if inside else Fraction(0)
        res.region_volume = Fraction(1 if inside else 0)
        return res
    if k == 2:
        exact = _exact_1d(sig, qmax)
        if exact is not None:
            res.value, res.region_volume = exact
            return res
        log.info("irrational breakpoints for k=2 weight %s; using subdivision", w)
    q = adaptive_integral(sig, qmax, tol, max_boxes)
    res.quadrature = q
    res.region_volume = q.region_volume
    return res


def full_integral(k: int, a, model: SurfaceModel | None = None, convention: str = CORRECTED) -> Fraction:
    """Coefficient of c_1^2 of the unrestricted integral for a constant-D model."""
    model = SurfaceModel.ball() if model is None else model
    sig = _Signed.build(k, a, model, convention)
    val = sig.integrand
    for v in x_context(k):
        val = val.integrate_box({v: (0, 1)})
        if not isinstance(val, MultiPoly):
            break
    return val if not isinstance(val, MultiPoly) else val.constant_value()


__all__ = [
    "SurfaceModel",
    "MorseNormalization",
    "Degenerate",
    "MorseResult",
    "QuadratureResult",
    "QuadratureError",
    "ball_quotient_D",
    "fg_via_integrals",
    "fiber_integrals",
    "negativity_count",
    "restricted_morse_integral",
    "full_integral",
    "integrate_product",
    "DVAR",
    "avar",
]
