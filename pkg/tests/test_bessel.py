import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from christoffel_asymptotics.bessel import (
    L_alpha,
    _hankel,
    _series,
    bessel_j,
    bessel_zero,
    bessel_zeros,
    endpoint_gamma_constant,
    gamma,
    kernel_Jcal,
    kernel_square_integral,
)

J0_FIRST_ZERO = 2.404825557695773


def _mp_bisect_j0_zero():
    # independent oracle: bisection on mpmath's J0
    lo, hi = mpmath.mpf(2), mpmath.mpf(3)
    with mpmath.workdps(30):
        for _ in range(120):
            mid = (lo + hi) / 2
            if mpmath.besselj(0, lo) * mpmath.besselj(0, mid) <= 0:
                hi = mid
            else:
                lo = mid
    return float(lo)


def test_j_examples():
    assert bessel_j(0, 0.0) == 1.0
    assert math.isclose(bessel_j(0.5, math.pi / 2), 2 / math.pi, rel_tol=1e-14)
    assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-12


def test_kernel_examples():
    assert kernel_Jcal(0.7, 0.0) == 1.0
    assert abs(kernel_Jcal(0.5, math.pi)) < 1e-15
    assert math.isclose(kernel_Jcal(0.5, math.pi / 2), 2 / math.pi, rel_tol=1e-14)
    assert kernel_Jcal(1.5, -3.0) == kernel_Jcal(1.5, 3.0)


def test_zero_examples():
    assert _mp_bisect_j0_zero() == pytest.approx(J0_FIRST_ZERO, abs=1e-15)
    assert abs(bessel_zero(0, 1) - J0_FIRST_ZERO) < 1e-12
    for k, z in enumerate(bessel_zeros(0.5, 20), start=1):
        assert abs(z - k * math.pi) < 1e-12


def test_half_order_seed_is_exact():
    # the leading McMahon term (k + beta/2 - 1/4) pi is k pi for beta = 1/2
    for k in range(1, 30):
        assert (k + 0.5 * 0.5 - 0.25) * math.pi == k * math.pi


@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 1.0, 2.5, 7.0])
def test_zeros_match_scipy_and_mpmath(beta):
    ours = np.array(bessel_zeros(beta, 40))
    if beta == int(beta):
        ref = special.jn_zeros(int(beta), 40)
    else:
        ref = np.array([float(mpmath.besseljzero(beta, k)) for k in range(1, 41)])
    assert np.allclose(ours, ref, rtol=0, atol=1e-11 * np.max(ref))


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.3, 3.0])
def test_j_matches_scipy(beta):
    x = np.linspace(0.0, 80.0, 801)
    assert np.allclose(bessel_j(beta, x), special.jv(beta, x), rtol=0, atol=2e-13)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 2.0])
def test_series_and_hankel_agree_on_overlap(beta):
    xs = np.linspace(8.0, 16.0, 33)
    hank = _hankel(beta, xs)
    ser = np.array([_series(beta, float(x), False) for x in xs])
    assert np.max(np.abs(hank - ser)) < 1e-6


@given(beta=st.floats(0.05, 6.0))
def test_zero_interlacing(beta):
    a = bessel_zeros(beta, 12)
    b = bessel_zeros(beta + 1.0, 12)
    for k in range(11):
        assert a[k] < b[k] < a[k + 1]


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.5])
def test_product_formula_converges(beta):
    zs = np.linspace(0.0, 5.0, 21)[1:]
    target = kernel_Jcal(beta, zs)
    zeros = np.array(bessel_zeros(beta, 200))
    errs = []
    for K in (50, 100, 200):
        prod = np.prod(1.0 - zs[:, None] ** 2 / zeros[None, :K] ** 2, axis=1)
        errs.append(np.abs(prod - target))
    assert np.all(errs[1] < errs[0]) and np.all(errs[2] < errs[1])


def test_gamma_lanczos():
    for x in np.linspace(0.05, 19.9, 200):
        assert math.isclose(gamma(float(x)), math.gamma(float(x)), rel_tol=1e-13)


def test_L_alpha_examples():
    assert math.isclose(L_alpha(0), math.pi, rel_tol=1e-14)
    assert math.isclose(L_alpha(1), 4.0, rel_tol=1e-14)
    assert math.isclose(L_alpha(-0.5), math.sqrt(2) * math.gamma(0.25) * math.gamma(1.25), rel_tol=1e-13)
    assert math.isclose(endpoint_gamma_constant(1), 2.0, rel_tol=1e-14)


def test_kernel_square_integral_examples():
    v = kernel_square_integral(0, 50)
    assert math.pi - 2 / 50 <= v <= math.pi
    assert kernel_square_integral(1, 50) <= 4.0


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_kernel_square_integral_monotone_and_bounded(alpha):
    vals = [kernel_square_integral(alpha, A) for A in (5, 10, 50, 200)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= L_alpha(alpha) * (1 + 1e-9)


def test_kernel_square_integral_vs_scipy_quad():
    from scipy import integrate

    ref, _ = integrate.quad(lambda x: (math.sin(x) / x) ** 2, 0, 10, limit=200, epsabs=1e-13)
    assert math.isclose(kernel_square_integral(0, 10), 2 * ref, rel_tol=1e-10)


def test_invalid_orders():
    with pytest.raises(ValueError):
        kernel_Jcal(0.0, 1.0)
    with pytest.raises(ValueError):
        kernel_square_integral(-1.0, 10)
