import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from christoffel_asymptotics.asymptotics import Prediction, extrapolate, predict_endpoint, predict_interior
from christoffel_asymptotics.bessel import L_alpha

SQRT2 = math.sqrt(2.0)


def test_interior_examples():
    p = predict_interior(1, 1 / math.pi, 0)
    assert p.kind == "interior" and p.kappa == 1 and math.isclose(p.limit, math.pi, rel_tol=1e-15)
    assert math.isclose(predict_interior(1, 1 / (2 * math.pi), 0).limit, 2 * math.pi, rel_tol=1e-15)
    for alpha in (0.5, 1.0, 2.0):
        p = predict_interior(1, 1 / (2 * math.pi), alpha)
        assert math.isclose(p.limit, 2 ** (alpha + 1) * L_alpha(alpha), rel_tol=1e-14)


def test_endpoint_examples():
    p = predict_endpoint(1, 1 / (math.pi * SQRT2), 0)
    assert p.kind == "endpoint" and p.kappa == 2 and math.isclose(p.limit, 2.0, rel_tol=1e-14)
    for alpha in (0.0, 0.5, 1.0, 3.0):
        g = math.gamma(alpha + 1) * math.gamma(alpha + 2)
        assert math.isclose(predict_endpoint(1, 1 / math.pi, alpha).limit, g, rel_tol=1e-13)
        assert math.isclose(predict_endpoint(1, 1 / (math.pi * SQRT2), alpha).limit, 2 ** (alpha + 1) * g, rel_tol=1e-13)


@given(w0=st.floats(0.01, 100), omega0=st.floats(0.01, 10))
def test_L0_is_pi(w0, omega0):
    assert math.isclose(predict_interior(w0, omega0, 0).limit, math.pi * w0 / (math.pi * omega0), rel_tol=1e-14)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_endpoint_composition(alpha):
    got = predict_endpoint(1, 1 / (math.pi * SQRT2), alpha).limit
    assert math.isclose(got, 2 ** (alpha + 1) * math.gamma(alpha + 1) * math.gamma(alpha + 2), rel_tol=1e-13)


@given(w0=st.floats(0.01, 100), M=st.floats(0.01, 10), alpha=st.floats(-0.99, 6))
def test_folded_identity(w0, M, alpha):
    lhs = 2 ** (2 * alpha + 2) * predict_endpoint(w0, M, alpha).limit
    rhs = predict_interior(w0, M, 2 * alpha + 1).limit
    assert math.isclose(lhs, rhs, rel_tol=1e-12)


def test_prediction_validation():
    with pytest.raises(ValueError):
        predict_interior(0, 1, 0)
    with pytest.raises(ValueError):
        predict_endpoint(1, -1, 0)
    with pytest.raises(ValueError):
        predict_interior(1, 1, -1)
    with pytest.raises(ValueError):
        Prediction("interior", 1.0, -2.0)


@given(c0=st.floats(-10, 10), c1=st.floats(-10, 10))
def test_extrapolate_exact_model(c0, c1):
    ns = [16, 25, 40, 64, 100, 160, 200]
    lim, res = extrapolate([(n, c0 + c1 / n) for n in ns])
    assert abs(lim - c0) < 1e-12 * max(1.0, abs(c0), abs(c1))
    assert res < 1e-12 * max(1.0, abs(c0), abs(c1))


def test_extrapolate_examples():
    ns = range(50, 201, 10)
    lim, _ = extrapolate([(n, n * n * 2 / (n + 1) ** 2) for n in ns])
    assert abs(lim - 2) < 1e-3
    lim, _ = extrapolate([(n, n * 2 * math.pi / (n + 1)) for n in ns])
    assert abs(lim - 2 * math.pi) < 1e-3


def test_extrapolate_uses_tail_and_validates():
    ex = extrapolate([(1, 100.0), (2, 100.0), (10, 1.1), (20, 1.05), (40, 1.025)])
    assert [n for n, _ in ex.used] == [10, 20, 40]
    assert abs(ex.limit - 1.0) < 1e-12
    with pytest.raises(ValueError):
        extrapolate([(1, 1.0), (2, 1.0)])
    with pytest.raises(ValueError):
        extrapolate([(3, 1.0), (2, 1.0), (4, 1.0)])
    assert math.isinf(extrapolate([(1, 1.0), (2, math.nan), (3, math.nan)]).residual)
