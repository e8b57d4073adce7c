"""Exit criteria.  Each test is one criterion; the pass/fail lines are
printed in the terminal summary (see conftest.py)."""

import random
import time
from fractions import Fraction as F

import pytest

from jetmorse.chern import TowerRingElement, intersection_polynomials, top_class
from jetmorse.cone import (
    OUTSIDE,
    SurfaceInvariants,
    cone_contains,
    from_slacks,
    jet_order_for_surface,
    mk_table,
    theta_positivity_certificate,
)
from jetmorse.exact import MultiPoly
from jetmorse.morse import SurfaceModel, fg_via_integrals, negativity_count, restricted_morse_integral
from jetmorse.recursion import WeightVector, curvature_profile, theta, transfer_matrix, w, y

REFERENCE_K3 = F(-715933, 1944000)


@pytest.fixture(scope="module")
def mk4():
    t = time.perf_counter()
    table = mk_table(4)
    return table, time.perf_counter() - t


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_criterion_1_anchor_intersections():
    u1 = TowerRingElement.gen("u1", 1)
    val, dt = timed(lambda: top_class(u1**3))
    assert val == (1, -1) and dt < 1  # c1^2 - c2

    u2 = TowerRingElement.gen("u2", 2)
    val, dt = timed(lambda: top_class(u2**4))
    assert val == (-1, 5) and dt < 1  # -c1^2 + 5 c2
    (f, g), dt = timed(lambda: fg_via_integrals(2, (0, 1)))
    assert (f, -g) == (-1, 5) and dt < 1
    (f, g), dt = timed(lambda: intersection_polynomials(2).at((0, 1)))
    assert (f, -g) == (-1, 5) and dt < 1

    e = 2 * TowerRingElement.gen("u1", 2) + u2
    val, dt = timed(lambda: top_class(e**4))
    assert val == (39, -27) and dt < 1


def test_criterion_2_seed_bound_table(mk4):
    seeds = {2: ((2, 1), F(13, 9)), 3: ((6, 2, 1), F(1195, 742)), 4: ((18, 6, 2, 1), F(442243, 271697))}
    for k, (a, ratio) in seeds.items():
        assert intersection_polynomials(k).ratio(a) == ratio
    table, elapsed = mk4
    assert table[0].certified_lower_bound >= 1
    for rec in table[1:]:
        assert rec.certified_lower_bound >= seeds[rec.k][1]
    assert elapsed <= 60


def test_criterion_3_ball_quotient_morse_integrals():
    t = time.perf_counter()
    ball = SurfaceModel.ball()
    r1 = restricted_morse_integral(1, (1,), ball)
    assert r1.exact and r1.value == F(2, 3)
    r2 = restricted_morse_integral(2, (0, 1), ball)
    assert r2.exact and r2.value == F(8, 27)
    # region {0 < x < 2/3}: volume 2/3, eigenvalue degenerate exactly at 2/3
    assert r2.region_volume == F(2, 3)
    assert not isinstance(negativity_count(2, (0, 1), ball, (F(2, 3),)), int)
    assert negativity_count(2, (0, 1), ball, (F(2, 3) - F(1, 10**6),)) == 1
    assert negativity_count(2, (0, 1), ball, (F(2, 3) + F(1, 10**6),)) == 2
    r3 = restricted_morse_integral(3, (0, 0, 1), ball, tol=F(5, 1000))
    q = r3.quadrature
    assert abs(q.estimate - float(REFERENCE_K3)) <= 5e-3
    assert q.lower <= REFERENCE_K3 <= q.upper
    assert time.perf_counter() - t <= 120


def test_criterion_4_cross_engine_oracle():
    for k in range(1, 6):
        assert fg_via_integrals(k) == intersection_polynomials(k), f"k={k}"


def test_criterion_5_identity_suite():
    for n in range(1, 7):
        t = transfer_matrix(n, 1)
        ctx = t.alpha.vars
        gsum, dsum, det = MultiPoly.zero(ctx), MultiPoly.const(1, ctx), MultiPoly.const(1, ctx)
        for h in range(1, n + 1):
            th = transfer_matrix(h, 1)
            gsum = gsum - th.alpha.embed(ctx)
            dsum = dsum - th.beta.embed(ctx)
            det = det * (1 - 2 * MultiPoly.var(f"x{h}", ctx))
        assert t.gamma == gsum and t.delta == dsum
        assert t.determinant() == det
        # shift invariance
        shifted = transfer_matrix(n + 2, 3)
        ren = {f"x{i}": f"x{i + 2}" for i in range(1, n + 1)}
        assert all(getattr(t, e).rename(ren) == getattr(shifted, e) for e in ("alpha", "beta", "gamma", "delta"))
        # w closed form
        for q in range(1, n + 1):
            cq = transfer_matrix(n, q).alpha.vars
            rhs = MultiPoly.const(F(2, 3) ** (n - q + 1), cq)
            for l in range(q, n + 1):
                rhs = rhs + y(n, l).embed(cq) * (F(2, 3) ** (l - q) / 3)
            assert w(n, q) == rhs
    # y vertex recurrences
    for j in range(1, 6):
        cur = [None] + [y(h, 1).embed(tuple(f"x{s}" for s in range(1, j + 1))) for h in range(1, j + 1)]
        nxt = y(j + 1, 1)
        assert nxt.evaluate({f"x{j + 1}": 0}) == cur[j]
        rhs = -1 - 2 * cur[j]
        for h in range(1, j):
            rhs = rhs - cur[h]
        assert nxt.evaluate({f"x{j + 1}": 1}) == rhs
    # trace expansion and D = 2/9 quarter-determinant identity
    for k in range(1, 7):
        a = WeightVector.symbolic(k)
        prof = curvature_profile(k, a)
        al, b = prof.al, prof.b
        assert prof.det_at(F(2, 9)) == (al + b) ** 2 / 4 - (al - b) ** 2 / 36
        if k >= 2:
            rhs = a.coeff(1) * F(2, 3) + a.coeff(k) * F(2, 3) ** (k - 1)
            for s in range(1, k - 1):
                rhs = rhs + a.coeff(s + 1) * F(2, 3) ** (s + 1)
            for l in range(1, k):
                rhs = rhs + theta(k, l, a) * (F(2, 3) ** (l - 1) / 3)
            assert prof.horiz_trace == rhs
    # F_k(., 0) = 0 and dF_k/da_k at 0 = (k+2) F_{k-1}, same for G
    for k in range(2, 7):
        cur, prev = intersection_polynomials(k), intersection_polynomials(k - 1)
        last = f"a{k}"
        for P, Q in ((cur.F, prev.F), (cur.G, prev.G)):
            assert P.evaluate({last: 0}) == MultiPoly.zero(Q.vars)
            assert P.partial_derivative(last).evaluate({last: 0}) == Q * (k + 2)


def test_criterion_6_cone_lemmas():
    rng = random.Random(2024)
    inside = outside = 0
    while inside < 200:
        k = rng.randint(1, 6)
        a = from_slacks([F(rng.randint(1, 60), rng.randint(1, 9)) for _ in range(k)])
        assert theta_positivity_certificate(k, a).positive, a
        inside += 1
    while outside < 200:
        k = rng.randint(1, 6)
        slacks = [F(rng.randint(-40, 40), rng.randint(1, 9)) for _ in range(k)]
        a = from_slacks(slacks)
        if cone_contains(a) != OUTSIDE:
            continue
        cert = theta_positivity_certificate(k, a)
        assert not cert.positive and cert.value <= 0, a
        outside += 1


def test_criterion_7_surface_checker_table(mk4):
    table, _ = mk4

    def order(c1sq, c2):
        return jet_order_for_surface(SurfaceInvariants.of(c1sq, c2), 4, table=table).order

    assert order(10, 7) == 1
    assert order(9, 12) == 2
    # c2/c1sq = 8/5 lies in (13/9, 1195/742)
    assert 1195 * 5 > 742 * 8 and F(8, 5) > F(13, 9)
    assert order(5, 8) <= 3
    # c2/c1sq = 162/100 lies in (1195/742, 442243/271697)
    assert 442243 * 100 > 271697 * 162 and F(162, 100) > F(1195, 742)
    assert order(100, 162) <= 4
    hyp = SurfaceInvariants.hypersurface(5)
    rep = jet_order_for_surface(hyp, 4, table=table)
    assert rep.order is None and hyp.ratio == 11


def test_criterion_8_monotone_and_floor(mk4):
    table, _ = mk4
    bounds = [r.certified_lower_bound for r in table]
    assert [r.k for r in table] == [1, 2, 3, 4]
    assert all(b >= F(1, 3) for b in bounds)
    assert all(a <= b for a, b in zip(bounds, bounds[1:]))
