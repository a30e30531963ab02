import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from christoffel_asymptotics.geometry import Lemniscate, UnitCircle
from christoffel_asymptotics.polynomials import ComplexPolynomial
from christoffel_asymptotics.quadrature import gauss_jacobi, integrate_arc, integrate_singular


def test_one_point_legendre():
    r = gauss_jacobi(1, 0, 0)
    assert np.allclose(r.x, [0.0], atol=1e-15)
    assert np.allclose(r.w, [2.0], rtol=1e-15)


def test_two_point_legendre():
    r = gauss_jacobi(2, 0, 0)
    assert np.allclose(np.sort(r.x), [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-14)
    assert np.allclose(r.w, [1.0, 1.0], rtol=1e-14)


def test_chebyshev_rule_second_moment():
    r = gauss_jacobi(4, -0.5, -0.5)
    assert math.isclose(float(np.sum(r.w * r.x**2)), math.pi / 2, rel_tol=1e-14)


@pytest.mark.parametrize("order,p,q", [(8, 0.3, -0.7), (20, 2.5, 0.0), (33, -0.5, 1.5)])
def test_rule_matches_scipy(order, p, q):
    r = gauss_jacobi(order, p, q)
    x_ref, w_ref = special.roots_jacobi(order, p, q)
    assert np.allclose(np.sort(r.x), np.sort(x_ref), atol=1e-13)
    assert np.allclose(np.sort(r.w), np.sort(w_ref), rtol=1e-11)


@given(
    order=st.integers(1, 40),
    p=st.floats(-0.95, 4.0),
    q=st.floats(-0.95, 4.0),
)
def test_weight_sum_is_beta_integral(order, p, q):
    r = gauss_jacobi(order, p, q)
    exact = 2 ** (p + q + 1) * math.exp(special.betaln(p + 1, q + 1))
    assert math.isclose(float(np.sum(r.w)), exact, rel_tol=1e-12)


@given(order=st.integers(2, 30), p=st.floats(-0.9, 3.0), q=st.floats(-0.9, 3.0))
def test_rule_is_exact_to_degree(order, p, q):
    r = gauss_jacobi(order, p, q)
    deg = 2 * order - 1
    # Jacobi moments of x^k via the beta function in t = (1 + x)/2
    for k in (0, deg // 2, deg):
        exact = sum(
            math.comb(k, j) * (-1) ** (k - j) * 2 ** (p + q + 1 + j) * math.exp(special.betaln(p + 1, q + 1 + j))
            for j in range(k + 1)
        )
        got = float(np.sum(r.w * r.x**k))
        assert abs(got - exact) <= 1e-10 * max(1.0, sum(abs(math.comb(k, j)) * 2.0**j for j in range(k + 1)))


def test_singular_examples():
    assert math.isclose(integrate_singular(lambda x: 1.0, -1, 1, s=0, alpha=0.5), 4 / 3, rel_tol=1e-12)
    assert math.isclose(integrate_singular(lambda x: 1.0, -1, 1), 2.0, rel_tol=1e-14)
    assert math.isclose(integrate_singular(lambda x: x**2, -1, 1, s=0, alpha=-0.5), 0.8, rel_tol=1e-12)


def test_singular_endpoint_strong_singularity():
    got = integrate_singular(np.cos, 0, 1, s=0, alpha=-0.9)
    ref = sum((-1) ** k / (math.factorial(2 * k) * (2 * k + 0.1)) for k in range(20))
    assert math.isclose(got, ref, rel_tol=1e-11)


def test_bad_exponent():
    with pytest.raises(ValueError):
        gauss_jacobi(4, -1.0, 0.0)
    with pytest.raises(ValueError):
        integrate_singular(lambda x: 1.0, -1, 1, s=0, alpha=-1.0)


@given(
    coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=8),
    s=st.floats(-0.9, 0.9),
    alpha=st.floats(-0.8, 2.5),
)
def test_singular_additivity(coeffs, s, alpha):
    f = np.polynomial.Polynomial(coeffs)
    tol = 1e-12
    whole = integrate_singular(f, -1, 1, s=s, alpha=alpha, tol=tol)
    left = integrate_singular(f, -1, s, s=s, alpha=alpha, tol=tol)
    right = integrate_singular(f, s, 1, s=s, alpha=alpha, tol=tol)
    assert abs(whole - (left + right)) <= 2 * tol * max(1.0, abs(whole)) + 1e-13


@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=10), alpha=st.floats(-0.8, 2.5))
def test_order_doubling_within_error(coeffs, alpha):
    f = np.polynomial.Polynomial(coeffs)
    v1, e1 = integrate_singular(f, -1, 1, s=0.2, alpha=alpha, order=20, return_error=True)
    v2 = integrate_singular(f, -1, 1, s=0.2, alpha=alpha, order=40)
    assert abs(v1 - v2) <= max(e1, 1e-14 * max(1.0, abs(v1)))


def test_arc_examples():
    assert math.isclose(integrate_arc(UnitCircle(), lambda z: 1.0), 2 * math.pi, rel_tol=1e-12)
    lem = Lemniscate(ComplexPolynomial((0, 0, 1)))
    assert math.isclose(integrate_arc(lem, lambda z: 1.0), 2 * math.pi, rel_tol=1e-12)
    got = integrate_arc(UnitCircle(), lambda z: abs(z - 1j) ** 2)
    assert math.isclose(got, 4 * math.pi, rel_tol=1e-12)
