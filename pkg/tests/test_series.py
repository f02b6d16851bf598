import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyareset.series import (
    DEFAULT_ORDER,
    EXACT,
    FLOAT,
    BivariateSeries,
    FieldMismatchError,
    OrderMismatchError,
    SeriesError,
    from_coeffs,
    series_arith,
    series_exp,
    series_log,
    series_rescale,
    series_sqrt,
    variable,
)
from polyareset.surd import QuadraticSurd

F = Fraction


def S(coeffs, order=None, field=EXACT):
    return from_coeffs(coeffs, len(coeffs) - 1 if order is None else order, field)


# -- construction and field discipline ---------------------------------------------


def test_length_matches_order():
    s = S([1, 2], order=5)
    assert s.order == 5 and len(s.coeffs) == 6


def test_default_orders():
    assert DEFAULT_ORDER == {EXACT: 256, FLOAT: 1024}


def test_exact_field_refuses_floats():
    with pytest.raises(FieldMismatchError):
        S([1, 0.5])


def test_mixing_fields_is_an_error():
    with pytest.raises(FieldMismatchError):
        S([1, 1]) + S([1, 1], field=FLOAT)
    with pytest.raises(FieldMismatchError):
        series_arith(S([1, 1]), S([1, 1], field=FLOAT), "mul")


def test_order_mismatch_is_an_error():
    with pytest.raises(OrderMismatchError):
        series_arith(S([1, 1]), S([1, 1, 1]), "add")


def test_division_by_zero_constant_term():
    with pytest.raises(ZeroDivisionError):
        series_arith(S([1, 0]), S([0, 1]), "div")


def test_unknown_operation():
    with pytest.raises(SeriesError):
        series_arith(S([1]), S([1]), "pow")


def test_series_are_immutable():
    for field in (EXACT, FLOAT):
        s = S([1, 2, 3], field=field)
        s.coeffs[0] = 7
        s.to_numpy()[0] = 7
        assert s[0] == 1


# -- documented examples ------------------------------------------------------------


def test_geometric_series():
    assert series_arith(S([1, 0, 0, 0, 0]), S([1, -1, 0, 0, 0]), "div").coeffs == [1] * 5


def test_difference_of_squares():
    assert series_arith(S([1, -1, 0]), S([1, 1, 0]), "mul").coeffs == [1, 0, -1]


def test_reset_survival_series():
    r = F(1, 2)
    phi = series_arith(S([1, 0, 0, 0]), S([1, -(1 - r), 0, 0]), "div")
    assert phi.coeffs == [1, F(1, 2), F(1, 4), F(1, 8)]


def test_sqrt_examples():
    assert (1 / series_sqrt(S([1, -1, 0, 0]))).coeffs == [1, F(1, 2), F(3, 8), F(5, 16)]
    assert series_sqrt(S([1, 0, 0, 0])).coeffs == [1, 0, 0, 0]
    rho = 1 - series_sqrt(S([1, 0, -1] + [0] * 6))
    assert rho.coeffs == [0, 0, F(1, 2), 0, F(1, 8), 0, F(1, 16), 0, F(5, 128)]


def test_sqrt_errors():
    with pytest.raises(SeriesError):
        series_sqrt(S([0, 1]))
    with pytest.raises(SeriesError):
        series_sqrt(S([-1, 1]))
    with pytest.raises(SeriesError):
        series_sqrt(S([2, 1]))
    assert series_sqrt(S([2, 1], field=FLOAT))[0] == pytest.approx(2**0.5)


def test_log_examples():
    assert series_log(1 / S([1, -1, 0, 0, 0])).coeffs == [0, 1, F(1, 2), F(1, 3), F(1, 4)]
    assert series_log(S([1, 1, 0, 0])).coeffs == [0, 1, F(-1, 2), F(1, 3)]
    assert series_log(series_exp(variable(3))).coeffs == [0, 1, 0, 0]
    with pytest.raises(SeriesError):
        series_log(S([2, 1]))


def test_rescale_examples():
    assert series_rescale(S([1, 1, 1]), 1 - F(1, 2)).coeffs == [1, F(1, 2), F(1, 4)]
    a = S([3, F(1, 7), -2, 5])
    assert series_rescale(a, 1) == a


def test_rescale_matches_direct_expansion():
    r = F(3, 10)
    order = 16
    rho = 1 - series_sqrt(S([1, 0, -1] + [0] * (order - 2)))
    direct = 1 - series_sqrt(S([1, 0, -((1 - r) ** 2)] + [0] * (order - 2)))
    assert series_rescale(rho, 1 - r) == direct


# -- invariants --------------------------------------------------------------------

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@st.composite
def exact_pair(draw, nonzero_head=True):
    order = draw(st.integers(0, 12))
    a = draw(st.lists(small_fractions, min_size=order + 1, max_size=order + 1))
    b = draw(st.lists(small_fractions, min_size=order + 1, max_size=order + 1))
    if nonzero_head and b[0] == 0:
        b[0] = F(1)
    return S(a), S(b)


@given(exact_pair())
def test_div_inverts_mul_exactly(pair):
    a, b = pair
    assert series_arith(series_arith(a, b, "mul"), b, "div") == a


@given(exact_pair())
def test_div_inverts_mul_float(pair):
    a, b = (x.to_float() for x in pair)
    got = series_arith(series_arith(a, b, "mul"), b, "div").to_numpy()
    # conditioning of the division grows with the ratio of b's tail to its head
    scale = max(1.0, *np.abs(b.to_numpy()) / abs(b[0])) ** a.order
    assert np.max(np.abs(got - a.to_numpy())) <= 1e-13 * scale * max(1.0, np.max(np.abs(a.to_numpy())))


@given(st.integers(0, 20), st.lists(small_fractions, min_size=21, max_size=21), st.integers(1, 5))
def test_sqrt_squares_back(order, tail, head):
    a = S([F(head * head)] + tail[:order], order=order)
    root = series_sqrt(a)
    assert root * root == a


@given(st.integers(1, 15), st.lists(small_fractions, min_size=16, max_size=16))
def test_log_exp_inverse(order, tail):
    a = S([F(0)] + tail[:order], order=order)
    assert series_log(series_exp(a)) == a
    b = S([F(1)] + tail[:order], order=order)
    assert series_exp(series_log(b)) == b


@given(st.integers(2, 60))
def test_exact_and_float_generating_functions_agree(order):
    one_minus_z2 = S([1, 0, -1] + [0] * (order - 2))
    exact_rho = 1 - series_sqrt(one_minus_z2)
    float_rho = 1 - series_sqrt(one_minus_z2.to_float())
    exact_surv = (1 - exact_rho) / S([1, -1] + [0] * (order - 1))
    float_surv = (1 - float_rho) / S([1, -1] + [0] * (order - 1), field=FLOAT)
    for e, f in ((exact_rho, float_rho), (exact_surv, float_surv)):
        ref = e.to_numpy()
        mask = ref != 0
        assert np.all(np.abs(f.to_numpy()[mask] / ref[mask] - 1) <= 1e-12)
        assert np.all(f.to_numpy()[~mask] == 0) or np.max(np.abs(f.to_numpy()[~mask])) < 1e-15


# -- bivariate series ------------------------------------------------------------


def test_bivariate_arithmetic():
    K = 4
    x = BivariateSeries.from_function(lambda i, j: 1 if (i, j) == (1, 0) else 0, K, F(0))
    y = BivariateSeries.from_function(lambda i, j: 1 if (i, j) == (0, 1) else 0, K, F(0))
    s = (1 + x) * (1 + y)
    assert s[1, 1] == 1 and s[2, 0] == 0
    inv = 1 / (1 - x - y)
    # coefficients of 1/(1-x-y) are binomials
    assert all(inv[i, j] == math.comb(i + j, i) for i in range(K + 1) for j in range(K + 1 - i))
    assert ((1 - x - y) * inv)[2, 1] == 0


def test_bivariate_log_and_sqrt():
    K = 5
    x = BivariateSeries.from_function(lambda i, j: 1 if (i, j) == (1, 0) else 0, K, F(0))
    y = BivariateSeries.from_function(lambda i, j: 1 if (i, j) == (0, 1) else 0, K, F(0))
    lg = (1 + x + y).log()
    # log(1 + s) = s - s^2/2 + ...; coefficient of x y is -1
    assert lg[1, 1] == -1 and lg[2, 0] == F(-1, 2)
    a = 4 + x + y * y
    root = a.sqrt(F(2))
    diff = root * root - a
    assert all(diff[i, j] == 0 for i in range(K + 1) for j in range(K + 1 - i))


def test_bivariate_over_quadratic_field():
    A = QuadraticSurd.sqrt_of(F(3, 17))
    K = 3
    zero = QuadraticSurd(0, 0, F(3, 17))
    s = BivariateSeries.from_function(lambda i, j: A if (i, j) == (1, 1) else 0, K, zero)
    inv = (1 + s).inverse()
    assert inv[1, 1] == -A
    assert float(A * A) == pytest.approx(3 / 17)


def test_bivariate_order_mismatch():
    a = BivariateSeries.constant(1, 3, F(0))
    b = BivariateSeries.constant(1, 4, F(0))
    with pytest.raises(OrderMismatchError):
        a + b
