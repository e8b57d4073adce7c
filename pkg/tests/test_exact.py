import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetmorse.exact import ContextError, MultiPoly, format_rational, multinomial, parse_rational

CTX = ("x", "y", "z")
x, y, z = MultiPoly.gens(CTX)
X1 = MultiPoly.var("x", ("x",))


def test_product_expansion():
    assert (1 - 3 * X1) * (F(2, 9) - X1 / 3) == X1**2 - X1 + F(2, 9)


def test_additive_identity():
    p = 3 * x * y - z + F(1, 7)
    assert p + 0 == p
    assert p + MultiPoly.zero(CTX) == p


def test_square_of_binomial():
    e = (1 - X1) - X1
    assert e * e == 4 * X1**2 - 4 * X1 + 1


def test_no_zero_terms_stored():
    p = x + y - x
    assert p.terms == {(0, 1, 0): F(1)}
    assert MultiPoly(CTX, {(1, 0, 0): 0}).terms == {}


def test_arity_and_context_errors():
    with pytest.raises(ContextError):
        MultiPoly(CTX, {(1, 0): 1})
    with pytest.raises(ContextError):
        x + X1
    with pytest.raises(ContextError):
        MultiPoly.var("w", CTX)


def test_evaluate_full_and_partial():
    assert (1 - 3 * X1).evaluate({"x": F(1, 3)}) == 0
    assert (F(2, 9) - X1 / 3).evaluate({"x": F(2, 3)}) == 0
    xy = MultiPoly.var("x1", ("x1", "x2")) * MultiPoly.var("x2", ("x1", "x2"))
    assert xy.evaluate({"x1": 1, "x2": 1}) == 1
    part = (x * y + z).evaluate({"x": 2})
    assert part.vars == ("y", "z")
    assert part == 2 * MultiPoly.var("y", ("y", "z")) + MultiPoly.var("z", ("y", "z"))


def test_integrate_box_examples():
    assert ((1 - 3 * X1) * (F(2, 9) - X1 / 3)).integrate_box({"x": (0, F(2, 3))}) == F(2, 81)
    assert MultiPoly.const(1, CTX).integrate_box({v: (0, 1) for v in CTX}) == 1
    # oracle: antiderivative -27(1-x)^4/4 evaluated at the endpoints
    assert (27 * (1 - X1) ** 3).integrate_box({"x": (0, 1)}) == F(27, 4)


def test_integrate_box_partial_and_signed():
    p = x * y
    r = p.integrate_box({"x": (0, 1)})
    assert r == MultiPoly.var("y", ("y", "z")) / 2
    assert X1.integrate_box({"x": (1, 0)}) == F(-1, 2)


def test_partial_derivative():
    assert (X1**2 - X1 + F(2, 9)).partial_derivative("x") == 2 * X1 - 1
    ctx = ("a1", "a2", "h")
    a2, h = MultiPoly.var("a2", ctx), MultiPoly.var("h", ctx) + MultiPoly.var("a1", ctx) ** 2
    d = (a2 * h).partial_derivative("a2").evaluate({"a2": 0})
    assert d == h.evaluate({"a2": 0})


def test_embed_restrict_rename():
    p = 2 * X1 + 1
    q = p.embed(("w", "x"))
    assert q.vars == ("w", "x") and q.evaluate({"w": 5, "x": 1}) == 3
    assert q.restrict(("x",)) == p
    with pytest.raises(ContextError):
        (q + MultiPoly.var("w", ("w", "x"))).restrict(("x",))
    assert p.rename({"x": "t"}).vars == ("t",)


def test_substitute():
    t = MultiPoly.var("t", ("t",))
    p = X1**2 + 1
    assert p.substitute({"x": 1 + 2 * t}, ("t",)) == 4 * t**2 + 4 * t + 2


def test_json_round_trip():
    p = F(715933, 1944000) * x**2 * z - y + 3
    text = p.to_json()
    obj = json.loads(text)
    assert obj["vars"] == ["x", "y", "z"]
    assert {"exp": [2, 0, 1], "coef": "715933/1944000"} in obj["terms"]
    assert MultiPoly.from_json(text) == p
    assert MultiPoly.from_json(text).to_json() == text


def test_rational_strings():
    assert format_rational(F(715933, 1944000)) == "715933/1944000"
    assert format_rational(3) == "3/1"
    assert parse_rational("-2/6") == F(-1, 3)
    assert parse_rational("5e-3") == F(1, 200)


def test_multinomial():
    assert multinomial((2, 1, 1)) == 12
    assert multinomial((4,)) == 1


# -- properties ---------------------------------------------------------------

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=30)
exps = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exps, fractions, max_size=6).map(lambda t: MultiPoly(CTX, t))
points = st.fixed_dictionaries({v: fractions for v in CTX})


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_fundamental_theorem(p):
    lhs = p.partial_derivative("x").integrate_box({"x": (0, 1)})
    rhs = p.evaluate({"x": 1}) - p.evaluate({"x": 0})
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(polys, polys, points)
def test_evaluation_is_a_ring_homomorphism(p, q, pt):
    pv, qv = p.evaluate(pt), q.evaluate(pt)
    assert (p + q).evaluate(pt) == pv + qv
    assert (p * q).evaluate(pt) == pv * qv
    assert (-p).evaluate(pt) == -pv
    assert (p**2).evaluate(pt) == pv**2
    assert (p * F(3, 7)).evaluate(pt) == pv * F(3, 7)
