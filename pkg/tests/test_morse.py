from fractions import Fraction as F

import pytest
import sympy as sp

from jetmorse.chern import intersection_polynomials
from jetmorse.morse import (
    Degenerate,
    MorseNormalization,
    QuadratureError,
    SurfaceModel,
    ball_quotient_D,
    fg_via_integrals,
    fiber_integrals,
    full_integral,
    negativity_count,
    restricted_morse_integral,
)
from jetmorse.recursion import LITERAL

BALL = SurfaceModel.ball()
REFERENCE_K3 = F(-715933, 1944000)


def test_ball_quotient_D():
    assert ball_quotient_D() == F(2, 9)
    assert BALL.D == F(2, 9)
    assert ball_quotient_D(c1sq=5, c2=5) == 0
    c1sq, c2 = F(10), F(7)
    assert ball_quotient_D(c1sq, c2) == (c1sq - c2) / (3 * c1sq)


def test_normalization():
    n = MorseNormalization.for_model(SurfaceModel(F(9), F(12)))
    assert n.J0 == F(9, 2) and n.JD == F(-1, 2)


def test_fiber_integrals_k2_against_sympy():
    x = sp.Symbol("x")
    for a, (al, b) in {(2, 1): (3 - 2 * x, x), (0, 1): (1 - 2 * x, x)}.items():
        th = a[0] + (1 - 3 * x)
        p_ref = sp.integrate(al * b * th, (x, 0, 1))
        q_ref = sp.integrate((al - b) ** 2 * th, (x, 0, 1))
        p, q = fiber_integrals(2, a)
        assert (p.constant_value(), q.constant_value()) == (F(str(p_ref)), F(str(q_ref)))
    p, q = fiber_integrals(2, (2, 1))
    assert (p.constant_value(), q.constant_value()) == (1, F(27, 4))
    p, q = fiber_integrals(2, (0, 1))
    assert (p.constant_value(), q.constant_value()) == (F(1, 3), F(-5, 4))


def test_fg_examples():
    form = fg_via_integrals(1)
    assert form.at((7,)) == (343, 343)
    assert fg_via_integrals(2, (2, 1)) == (39, 27)
    assert fg_via_integrals(2, (0, 1)) == (-1, -5)


@pytest.mark.parametrize("k", range(1, 6))
def test_cross_engine(k):
    assert fg_via_integrals(k) == intersection_polynomials(k)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_literal_convention_breaks_cross_engine(k):
    assert fg_via_integrals(k, convention=LITERAL) != intersection_polynomials(k)


def test_negativity_counts():
    assert negativity_count(2, (0, 1), BALL, (F(1, 4),)) == 0
    assert negativity_count(2, (0, 1), BALL, (F(1, 2),)) == 1
    assert negativity_count(2, (0, 1), BALL, (F(5, 6),)) == 2
    assert negativity_count(1, (1,), BALL, ()) == 0
    assert negativity_count(1, (-1,), BALL, ()) == 3


def test_negativity_degenerate_points():
    assert isinstance(negativity_count(2, (0, 1), BALL, (F(1, 3),)), Degenerate)
    assert isinstance(negativity_count(2, (0, 1), BALL, (F(2, 3),)), Degenerate)
    assert isinstance(negativity_count(2, (1, 0), BALL, (F(1, 2),)), Degenerate)


def test_negativity_errors():
    with pytest.raises(ValueError):
        negativity_count(2, (0, 1), BALL, (F(3, 2),))
    with pytest.raises(ValueError):
        negativity_count(2, (0, 1), SurfaceModel(F(3), F(1)), (F(1, 2),))
    with pytest.raises(ValueError):
        negativity_count(2, (0, 1), BALL, ())


def test_restricted_low_orders():
    r1 = restricted_morse_integral(1, (1,))
    assert r1.exact and r1.value == F(2, 3) and r1.region_volume == 1
    r2 = restricted_morse_integral(2, (0, 1))
    assert r2.exact and r2.value == F(8, 27)
    assert r2.region_volume == F(2, 3)


def test_restricted_k2_region_boundary_is_two_thirds():
    # qmax = 0 keeps only (0, 1/3); qmax = 1 extends to the det root 2/3
    r0 = restricted_morse_integral(2, (0, 1), qmax=0)
    assert r0.region_volume == F(1, 3)
    r1 = restricted_morse_integral(2, (0, 1), qmax=1)
    assert r1.region_volume == F(2, 3)
    r2 = restricted_morse_integral(2, (0, 1), qmax=2)
    assert r2.region_volume == 1 and r2.value == full_integral(2, (0, 1))


def test_full_integral_matches_ring_on_ball():
    assert full_integral(2, (0, 1)) == F(2, 3)
    # F c1^2 - G c2 with c2 = c1^2/3
    for a in [(2, 1), (0, 1), (6, 2, 1)]:
        f, g = intersection_polynomials(len(a)).at(a)
        assert full_integral(len(a), a) == f - g / 3
    assert full_integral(2, (0, 1)) - restricted_morse_integral(2, (0, 1)).value == F(10, 27)


@pytest.mark.parametrize("a", [(3, 1), (F(5, 2), 1), (7, 2, F(1, 2))])
def test_interior_weights_restricted_equals_full(a):
    k = len(a)
    r = restricted_morse_integral(k, a)
    full = full_integral(k, a)
    if r.exact:
        assert r.value == full
    else:
        assert r.quadrature.lower == r.quadrature.upper == full


def test_k3_quadrature_covers_reference():
    r = restricted_morse_integral(3, (0, 0, 1), tol=F(5, 1000))
    q = r.quadrature
    assert not r.exact
    assert q.error_bound <= 5e-3
    assert q.contains(REFERENCE_K3)
    assert abs(q.estimate - float(REFERENCE_K3)) <= 5e-3


def test_k3_quadrature_nested_under_halving():
    tol = F(1, 50)
    prev = restricted_morse_integral(3, (0, 0, 1), tol=tol).quadrature
    for _ in range(3):
        tol /= 2
        cur = restricted_morse_integral(3, (0, 0, 1), tol=tol).quadrature
        assert prev.lower <= cur.lower and cur.upper <= prev.upper
        assert prev.lower <= F(cur.estimate) <= prev.upper
        prev = cur


def test_quadrature_budget_failure():
    with pytest.raises(QuadratureError) as info:
        restricted_morse_integral(3, (0, 0, 1), tol=F(1, 10**9), max_boxes=50)
    assert info.value.lower <= REFERENCE_K3 <= info.value.upper


def test_zero_last_weight_gives_zero():
    r = restricted_morse_integral(2, (1, 0))
    assert r.value == 0
