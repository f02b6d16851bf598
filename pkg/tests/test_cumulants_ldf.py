import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

import oracles
from polyareset import spectral
from polyareset.cumulants_ldf import (
    MAX_SERIES_ORDER,
    LdfError,
    boundary_values,
    closed_form_cumulants,
    cumulant_amplitudes,
    dot_rate,
    entropy_series,
    legendre_joint,
    legendre_univariate,
    mean_density,
    quadratic_rate,
    reset_cumulant_polys,
    reset_cumulants,
    stirling2,
    univariate_grid,
    weak_reset_amplitudes,
    weak_reset_scaling,
)
from polyareset.surd import QuadraticSurd

F = Fraction
R_EXACT = [F(1, 20), F(4, 25), F(3, 10), F(1, 2), F(9, 10)]


def relclose(a, b, rel, floor=1e-12):
    return abs(a - b) <= rel * abs(b) or abs(a - b) <= floor


# -- series of the entropy function --------------------------------------------------


@pytest.fixture(scope="module")
def tables():
    return {r: cumulant_amplitudes(r, 3) for r in R_EXACT}


def test_series_starts_at_zero():
    S = entropy_series(F(3, 10), 4)
    assert S[0, 0] == 0
    assert isinstance(S[1, 0], QuadraticSurd)


@pytest.mark.parametrize("r", R_EXACT)
def test_series_matches_closed_forms(tables, r):
    got, ref = tables[r], closed_form_cumulants(r)
    for key, value in ref.c.items():
        assert relclose(got.c[key], value, 1e-10), key
    for n, value in ref.C.items():
        assert relclose(got.C[n], value, 1e-10), n


def test_float_series_matches_closed_forms():
    got, ref = cumulant_amplitudes(0.3, 3), closed_form_cumulants(0.3)
    assert all(relclose(got.c[k], v, 1e-10) for k, v in ref.c.items())


def test_quoted_second_order_values(tables):
    c = tables[F(3, 10)].c
    A = oracles.amplitude(0.3)
    assert c[(0, 2)] == pytest.approx(0.21, abs=1e-14)
    assert c[(1, 1)] == pytest.approx(0.7 / 1.7 * A - 0.21, abs=1e-14)
    assert c[(1, 1)] == pytest.approx(-0.0370242249, abs=1e-10)
    assert c[(1, 0)] + c[(0, 1)] == pytest.approx(A, abs=1e-14)


@given(st.sampled_from(R_EXACT), st.integers(1, 3))
def test_table_sum_identity(r, n):
    table = closed_form_cumulants(r)
    assert table.C[n] == pytest.approx(sum(math.comb(n, k) * table.c[(k, n - k)] for k in range(n + 1)), rel=1e-12)


def test_closed_forms_at_r_one():
    c = closed_form_cumulants(1).c
    assert c[(0, 1)] == 1
    assert all(abs(v) < 1e-14 for k, v in c.items() if k != (0, 1))
    assert closed_form_cumulants(0.3).c[(0, 3)] == pytest.approx(0.3 * 0.7 * 0.4, rel=1e-14)


def test_closed_form_total_variance():
    r = 0.3
    A = oracles.amplitude(r)
    assert closed_form_cumulants(r).C[2] == pytest.approx(-A + (2 - r * r) / (2 - r) ** 2, rel=1e-14)


def test_series_order_limits():
    with pytest.raises(ValueError):
        entropy_series(F(3, 10), MAX_SERIES_ORDER + 1)
    with pytest.raises(ValueError):
        entropy_series(0, 3)


@pytest.mark.parametrize("r", [F(3, 10), F(1, 20)])
def test_dot_cumulants_from_series(r):
    K = 8
    table = cumulant_amplitudes(r, K)
    ref = reset_cumulants(r, K)
    for l in range(1, K + 1):
        assert abs(table.c[(0, l)] - float(ref[l - 1])) <= 1e-12 * max(1.0, abs(float(ref[l - 1])))


def test_dot_cumulants_exact_to_order_twelve():
    r = F(3, 10)
    S = entropy_series(r, 12)
    ref = reset_cumulants(r, 12)
    for l in range(1, 13):
        value = S[0, l] * math.factorial(l)
        assert value == QuadraticSurd(ref[l - 1], 0, value.d)


# -- cumulants of the reset count ---------------------------------------------------


def test_reset_cumulant_examples():
    r = F(3, 10)
    c = reset_cumulants(r, 5)
    assert c[0] == r
    assert c[3] == r * (1 - r) * (1 - 6 * r + 6 * r * r)
    polys = reset_cumulant_polys(5)
    # c_{0,5} from the derivative recursion applied to c_{0,4}
    p4 = polys[3]
    d = [k * p4[k] for k in range(1, len(p4))]
    nxt = [F(0)] * (len(d) + 2)
    for k, a in enumerate(d):
        nxt[k + 1] += a
        nxt[k + 2] -= a
    assert nxt[: len(polys[4])] == polys[4]


def test_reset_cumulants_two_methods_agree():
    a = reset_cumulant_polys(12, "stirling")
    b = reset_cumulant_polys(12, "recursion")
    for p, q in zip(a, b):
        n = max(len(p), len(q))
        assert p + [0] * (n - len(p)) == q + [0] * (n - len(q))


def test_stirling_numbers():
    assert [stirling2(5, k) for k in range(6)] == [0, 1, 15, 25, 10, 1]
    assert stirling2(0, 0) == 1


@given(st.fractions(min_value=0, max_value=1, max_denominator=40))
def test_reset_cumulants_are_binomial(r):
    # cumulants of a Bernoulli(r) count: log(1 - r + r e^mu) derivatives
    c = reset_cumulants(r, 3)
    assert c == [r, r * (1 - r), r * (1 - r) * (1 - 2 * r)]


# -- weak resetting ------------------------------------------------------------------


def test_weak_reset_scaling_examples():
    for mu in (-1.0, 0.0, 0.7):
        assert weak_reset_scaling(0.0, mu) == pytest.approx(2 * (math.exp(mu) - 1), abs=1e-15)
    a = weak_reset_amplitudes(3)
    assert a == [F(1), F(3, 16), F(-15, 256), F(315, 4096)]


def test_weak_reset_limit():
    r = 1e-6
    A = oracles.amplitude(r)
    h, mu = 0.5, 0.2
    assert spectral.entropy(r, h * A, mu) / A**2 == pytest.approx(weak_reset_scaling(h, mu), abs=1e-2)


# -- boundary values and rate functions ------------------------------------------------


def test_boundary_values():
    I_A, I_B, I_C = boundary_values(0.3)
    assert I_A == pytest.approx(0.356675, abs=1e-6)
    assert I_A == pytest.approx(-math.log(0.7), rel=1e-15)
    assert I_C == pytest.approx(-math.log(0.3), rel=1e-15)
    assert boundary_values(0.5)[2] == pytest.approx(math.log(2), rel=1e-15)


@given(st.floats(0.01, 0.99))
def test_boundary_value_gap(r):
    I_A, I_B, _ = boundary_values(r)
    assert I_B - I_A == pytest.approx(0.5 * math.log(2), abs=1e-14)


def test_dot_solver_matches_binomial_form():
    r = 0.3
    for eta in univariate_grid("dot", 101):
        assert abs(legendre_univariate(r, "dot", eta).I - dot_rate(r, eta)) <= 1e-8
        closed = legendre_univariate(r, "dot", eta, method="closed")
        assert closed.I == dot_rate(r, eta)


def test_univariate_examples():
    r = 0.3
    assert legendre_univariate(r, "dot", r).I <= 1e-12
    I_A, I_B, I_C = boundary_values(r)
    assert dot_rate(r, 1 - 1e-12) == pytest.approx(I_C, abs=1e-9)
    assert abs(legendre_univariate(r, "cross", 1e-9).I - spectral.decay_rate(r)) <= 1e-6
    assert legendre_univariate(r, "cross", 0.5 - 1e-9).I == pytest.approx(I_B, abs=1e-6)


def test_univariate_argument_range():
    for which, bad in (("dot", 1.0), ("cross", 0.5), ("sum", 0.0)):
        with pytest.raises(LdfError):
            legendre_univariate(0.3, which, bad)


@pytest.fixture(scope="module")
def curves():
    r = 0.3
    return {w: np.array([legendre_univariate(r, w, x).I for x in univariate_grid(w)]) for w in ("dot", "cross", "sum")}


@pytest.mark.parametrize("which", ["dot", "cross", "sum"])
def test_univariate_convexity(curves, which):
    assert np.diff(curves[which], 2).min() >= -1e-8


@pytest.mark.parametrize("which", ["dot", "cross", "sum"])
def test_univariate_minima(curves, which):
    r = 0.3
    x0 = mean_density(r, which)
    assert legendre_univariate(r, which, x0).I <= 1e-10
    grid = univariate_grid(which)
    far = np.abs(grid - x0) > 1e-3
    assert np.all(curves[which][far] > 0)


def test_mean_densities():
    assert mean_density(0.3, "dot") == 0.3
    assert mean_density(0.3, "cross") == pytest.approx(oracles.XI0, abs=1e-6)
    assert mean_density(0.3, "sum") == pytest.approx(oracles.PHI0, abs=1e-6)


def test_joint_rate_at_mean():
    r = 0.3
    A, A_cross = spectral.amplitudes(r)
    p = legendre_joint(r, A_cross, r)
    assert p.I <= 1e-12 and max(abs(t) for t in p.tilt) <= 1e-8


@pytest.mark.parametrize("dx,dy", [(1e-3, 0.0), (0.0, 1e-3), (7e-4, -7e-4), (-7e-4, -7e-4)])
def test_joint_rate_is_quadratic_near_mean(dx, dy):
    r = 0.3
    _, A_cross = spectral.amplitudes(r)
    exact = legendre_joint(r, A_cross + dx, r + dy).I
    assert exact / quadratic_rate(r, A_cross + dx, r + dy) == pytest.approx(1, abs=0.01)


def test_joint_rejects_points_outside_triangle():
    for xi, eta in ((0.0, 0.3), (0.3, 0.5), (0.2, -0.1)):
        with pytest.raises(LdfError):
            legendre_joint(0.3, xi, eta)


def _interior_points(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        xi, eta = rng.uniform(0, 0.5), rng.uniform(0, 1)
        if 2 * xi + eta < 1:
            out.append((xi, eta))
    return out


def test_legendre_duality_random_points():
    r = 0.3
    for xi, eta in _interior_points(50, 11):
        p = legendre_joint(r, xi, eta)
        lam, mu = p.tilt
        assert abs(spectral.entropy(r, lam, mu) + p.I - lam * xi - mu * eta) <= 1e-9


@given(st.floats(0.02, 0.4), st.floats(0.05, 0.8), st.floats(0, 2 * math.pi))
def test_joint_rate_convex_along_segments(xi, eta, angle):
    r = 0.3
    step = 1e-3
    d = np.array([math.cos(angle), math.sin(angle)]) * step
    pts = [np.array([xi, eta]) + k * d for k in (-1, 0, 1)]
    if not all(p[0] > 1e-3 and p[1] > 1e-3 and 2 * p[0] + p[1] < 1 - 1e-3 for p in pts):
        return
    I = [legendre_joint(r, *p).I for p in pts]
    assert I[0] + I[2] - 2 * I[1] >= -1e-8


@pytest.mark.parametrize("eta", [0.1, 0.3, 0.6])
def test_contraction_to_dot_rate(eta):
    r = 0.3
    res = minimize_scalar(
        lambda x: legendre_joint(r, x, eta).I,
        bounds=(1e-6, (1 - eta) / 2 - 1e-6),
        method="bounded",
        options={"xatol": 1e-9},
    )
    assert abs(res.fun - dot_rate(r, eta)) <= 1e-6


def test_contraction_on_xi_grid():
    r = 0.3
    eta = 0.3
    grid = np.linspace(0.01, (1 - eta) / 2 - 0.01, 301)
    best = min(legendre_joint(r, x, eta).I for x in grid)
    assert abs(best - dot_rate(r, eta)) <= 1e-6
