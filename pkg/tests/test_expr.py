import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sheffer_szasz.errors import ConfigError
from sheffer_szasz.functions import (
    F1,
    F2,
    NAMED,
    Add,
    Mul,
    Neg,
    Num,
    Pow,
    Sub,
    Var,
    parse,
    resolve,
    to_polynomial,
    to_text,
)

literals = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False).map(Num)
exprs = st.recursive(
    st.one_of(literals, st.just(Var())),
    lambda sub: st.one_of(
        st.builds(Neg, sub),
        st.builds(Add, sub, sub),
        st.builds(Sub, sub, sub),
        st.builds(Mul, sub, sub),
        st.builds(Pow, sub, st.integers(0, 4)),
    ),
    max_leaves=8,
)


def eval_tree(e, x):
    """Direct recursive evaluation, the oracle for polynomial conversion."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Neg):
        return -eval_tree(e.arg, x)
    if isinstance(e, Pow):
        return eval_tree(e.base, x) ** e.exponent
    a, b = eval_tree(e.left, x), eval_tree(e.right, x)
    return a + b if isinstance(e, Add) else a - b if isinstance(e, Sub) else a * b


def magnitude(e, x):
    """Tree evaluation with every sign dropped; bounds the rounding scale of eval_tree."""
    if isinstance(e, (Num, Var)):
        return abs(eval_tree(e, x))
    if isinstance(e, Neg):
        return magnitude(e.arg, x)
    if isinstance(e, Pow):
        return magnitude(e.base, x) ** e.exponent
    a, b = magnitude(e.left, x), magnitude(e.right, x)
    return a * b if isinstance(e, Mul) else a + b


class TestRoundTrip:
    @settings(max_examples=300)
    @given(exprs)
    def test_parse_print(self, e):
        assert parse(to_text(e)) == e

    @settings(max_examples=100)
    @given(exprs)
    def test_print_is_fixed_point(self, e):
        text = to_text(e)
        assert to_text(parse(text)) == text


class TestParse:
    def test_precedence(self):
        assert parse("1 + 2*x^2") == Add(Num(1.0), Mul(Num(2.0), Pow(Var(), 2)))

    def test_left_associative(self):
        assert parse("x - 1 - 2") == Sub(Sub(Var(), Num(1.0)), Num(2.0))

    def test_unary_minus_binds_looser_than_power(self):
        assert parse("-x^2") == Neg(Pow(Var(), 2))

    def test_number_forms(self):
        assert parse("1.5e-3") == Num(1.5e-3)
        assert parse(".25") == Num(0.25)
        assert parse("3.") == Num(3.0)

    @pytest.mark.parametrize(
        "text",
        ["", "   ", "x +", "(x", "x)", "2x^", "x ^ 1.5", "x ^ -1", "x ^ 65", "y", "sin(x)", "x ** 2", "1 2", "*x"],
    )
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse(text)


class TestPolynomial:
    @settings(max_examples=150)
    @given(exprs, st.floats(-2, 2))
    def test_matches_tree_evaluation(self, e, x):
        want = eval_tree(e, x)
        got = to_polynomial(e)(x)
        assert abs(got - want) <= 1e-12 * (1 + magnitude(e, x))

    def test_f1_expression(self):
        f = resolve("(x - 0.5)*(x - 0.3333333333333333)")
        xs = np.linspace(0, 2, 11)
        np.testing.assert_allclose(f(xs), F1(xs), rtol=1e-14, atol=1e-15)
        np.testing.assert_allclose(f.d1(xs), F1.d1(xs), rtol=1e-14, atol=1e-15)
        np.testing.assert_allclose(f.d2(xs), 2.0)

    def test_f2_expression(self):
        f = resolve("-4*x^3")
        xs = np.linspace(0, 1, 5)
        np.testing.assert_array_equal(f(xs), F2(xs))
        np.testing.assert_array_equal(f.d2(xs), F2.d2(xs))


@pytest.mark.parametrize("name", sorted(NAMED))
def test_named_functions_resolve(name):
    fn = resolve(name)
    assert fn.name == name
    xs = np.linspace(0, 1, 9)
    h = 1e-6
    np.testing.assert_allclose(fn.d1(xs), (fn(xs + h) - fn(xs - h)) / (2 * h), atol=1e-6)
