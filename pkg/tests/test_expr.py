import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import CORPUS, numeric, s, to_sympy
from warpsol import expr as ex
from warpsol.errors import DomainError, ParseError


def ev(text, s):
    return ex.evaluate(ex.parse(text), s)


# -- parsing ---------------------------------------------------------------

@pytest.mark.parametrize("text, value", [
    ("-2^2", -4.0),
    ("2^3^2", 512.0),
    ("2^-1", 0.5),
    ("-s^2", -9.0),
    ("1 - 2 - 3", -4.0),
    ("12/3/2", 2.0),
    ("2*3+4", 10.0),
    ("2*(3+4)", 14.0),
    ("1.5e1", 15.0),
    (".5", 0.5),
    ("s − 1", 2.0),
    ("2 × s ÷ 3", 2.0),
    ("2·s", 6.0),
    ("--s", 3.0),
])
def test_precedence_and_literals(text, value):
    assert ev(text, 3.0) == pytest.approx(value)


def test_constants_and_functions():
    assert ev("pi", 0) == pytest.approx(math.pi)
    assert ev("e", 0) == pytest.approx(math.e)
    assert ev("log(e)", 0) == pytest.approx(1.0)
    assert ev("sqrt(s)*tan(s)", 0.3) == pytest.approx(math.sqrt(0.3) * math.tan(0.3))


@pytest.mark.parametrize("text, offset", [
    ("s^^2", 2),
    ("s*", 2),
    ("(s+1", 4),
    ("s+1)", 3),
    ("foo(s)", 0),
    ("sin s", 4),
    ("2 $ 3", 2),
    ("", 0),
    ("−−s +", 9),  # the two minus signs are 3 bytes each in UTF-8
])
def test_parse_error_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        ex.parse(text)
    assert info.value.offset == offset
    assert f"byte {offset}" in str(info.value)


def test_unknown_identifier_names_it():
    with pytest.raises(ParseError, match="got 'cosh'"):
        ex.parse("cosh(s)")


# -- evaluation ------------------------------------------------------------

def test_vectorized_matches_scalar():
    e = ex.parse("exp(sin(s)) / (1 + s^2)")
    pts = np.linspace(-2, 2, 17)
    vec = ex.evaluate(e, pts)
    assert vec.shape == pts.shape
    assert all(vec[i] == ex.evaluate(e, float(p)) for i, p in enumerate(pts))


def test_constant_broadcasts():
    out = ev("3", np.zeros(4))
    assert out.shape == (4,)
    assert np.all(out == 3)


@pytest.mark.parametrize("text, s", [
    ("log(s)", 0.0),
    ("log(s)", -1.0),
    ("sqrt(s)", -0.5),
    ("1/s", 0.0),
    ("s^(-1)", 0.0),
    ("s^(1/2)", -1.0),
    ("exp(exp(s))", 10.0),
])
def test_domain_errors(text, s):
    with pytest.raises(DomainError) as info:
        ev(text, np.array([1.0, s]))
    assert info.value.point == s


def test_negative_base_integer_exponent_is_fine():
    assert ev("s^3", -2.0) == -8.0
    assert ev("s^(-2)", -2.0) == 0.25


# -- printing and round trip -------------------------------------------------

def test_to_string_forms():
    assert ex.to_string(ex.parse("-3")) == "(-3)"
    assert ex.to_string(ex.Num(Fraction(-3))) == "(-3)"
    assert ex.to_string(ex.Num(Fraction(2, 3))) == "(2/3)"
    assert ex.to_string(ex.parse("s^2^3")) == "(s ^ (2 ^ 3))"


_leaf = st.one_of(
    st.just(ex.S),
    st.fractions(min_value=-5, max_value=5, max_denominator=7).map(ex.Num),
    st.sampled_from([ex.Const("pi"), ex.Const("e")]),
)


def _extend(children):
    binary = st.tuples(st.sampled_from([ex.Add, ex.Sub, ex.Mul, ex.Div, ex.Pow]), children, children)
    return st.one_of(
        binary.map(lambda t: t[0](t[1], t[2])),
        children.map(ex.Neg),
        st.tuples(st.sampled_from(ex.FUNCTIONS), children).map(lambda t: ex.Call(*t)),
    )


trees = st.recursive(_leaf, _extend, max_leaves=12)


@given(trees)
@settings(max_examples=300, deadline=None)
def test_print_parse_round_trip(tree):
    # literals like (1/2) and (-3) come back as Div/Neg nodes, equal after folding
    assert ex.simplify(ex.parse(ex.to_string(tree))) == ex.simplify(tree)


# -- simplification ----------------------------------------------------------

@pytest.mark.parametrize("text, folded", [
    ("1/3 + 1/6", "(1/2)"),
    ("2^10", "1024"),
    ("s*1 + 0", "s"),
    ("0*sin(s)", "0"),
    ("s^1", "s"),
    ("s^0", "1"),
    ("exp(0)", "1"),
    ("log(1)", "0"),
    ("log(e)", "1"),
    ("sqrt(1)", "1"),
    ("cos(0) + sin(0)", "1"),
    ("--s", "s"),
    ("(2/3)^(-2)", "(9/4)"),
])
def test_simplify_folds(text, folded):
    assert ex.to_string(ex.simplify(ex.parse(text))) == folded


def test_simplify_keeps_large_powers_symbolic():
    assert isinstance(ex.simplify(ex.parse("2^100")), ex.Pow)


@given(trees)
@settings(max_examples=200, deadline=None)
def test_simplify_preserves_values(tree):
    pts = np.linspace(0.3, 1.7, 7)
    try:
        ref = ex.evaluate(tree, pts)
    except DomainError:
        return
    got = ex.evaluate(ex.simplify(tree), pts)
    np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-9)


# -- differentiation against sympy --------------------------------------------

@pytest.mark.parametrize("text, interval", CORPUS)
@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_sympy(text, interval, order):
    e = ex.parse(text)
    ours = ex.differentiate(e, order)
    ref = numeric(sp.diff(to_sympy(e), s, order))
    pts = np.linspace(*interval, 23)
    np.testing.assert_allclose(ex.evaluate(ours, pts), ref(pts), rtol=1e-10, atol=1e-10)


def test_derivative_of_constant_is_zero():
    assert ex.differentiate(ex.parse("pi^2 + log(3)")) == ex.ZERO


def test_order_zero_is_identity():
    e = ex.parse("sin(s)")
    assert ex.differentiate(e, 0) == e
