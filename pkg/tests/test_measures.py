import math

import gmpy2
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from christoffel_asymptotics.geometry import CircularArc, Lemniscate, RealInterval, UnitCircle
from christoffel_asymptotics.measures import (
    MeasureError,
    UnsupportedGeometry,
    gram,
    make_measure,
    sqrt_pullback,
    total_mass,
)
from christoffel_asymptotics.polynomials import ComplexPolynomial


def _as_float(G):
    return np.array([[complex(x) for x in row] for row in G.entries])


def test_make_measure_locations():
    assert make_measure(RealInterval(-1, 1), 0).location == "interior"
    m = make_measure(RealInterval(0, 1), 0, alpha=1.5)
    assert m.location == "endpoint" and m.alpha == 1.5
    c = make_measure(UnitCircle(), 1j, alpha=1.0)
    assert c.location == "interior" and c.z0 == 1j


def test_make_measure_rejects():
    with pytest.raises(MeasureError):
        make_measure(RealInterval(-1, 1), 0, alpha=-1.0)
    with pytest.raises(MeasureError):
        make_measure(RealInterval(-1, 1), 2.0)
    with pytest.raises(MeasureError):
        make_measure(RealInterval(-1, 1), 0.5, w=lambda x: x)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 3.0, -0.5])
def test_total_mass_power(alpha):
    m = make_measure(RealInterval(-1, 1), 0, alpha=alpha)
    assert math.isclose(total_mass(m), 2 / (alpha + 1), rel_tol=1e-12)


def test_total_mass_circle_and_lemniscate():
    assert math.isclose(total_mass(make_measure(UnitCircle(), 1)), 2 * math.pi, rel_tol=1e-13)
    lem = Lemniscate(ComplexPolynomial((0, 0, 1)))
    assert math.isclose(total_mass(make_measure(lem, 1)), 2 * math.pi, rel_tol=1e-12)
    m = make_measure(UnitCircle(), 1j, alpha=2.0)
    # |e^{it} - i|^2 = 2 - 2 sin t
    assert math.isclose(total_mass(m), 4 * math.pi, rel_tol=1e-12)


def test_total_mass_quarter_arc():
    arc = CircularArc(0j, 2.0, 0.0, math.pi / 2)
    assert math.isclose(total_mass(make_measure(arc, 2.0)), math.pi, rel_tol=1e-12)


def test_gram_examples():
    G = _as_float(gram(make_measure(UnitCircle(), 1), 2, basis="monomial"))
    assert np.allclose(G, 2 * math.pi * np.eye(3), atol=1e-14)
    G = _as_float(gram(make_measure(RealInterval(-1, 1), 0), 1, basis="monomial"))
    assert np.allclose(G, [[2, 0], [0, 2 / 3]], atol=1e-15)
    G = _as_float(gram(make_measure(RealInterval(-1, 1), 0, alpha=1.0), 2, basis="monomial"))
    assert np.allclose(G, [[1, 0, 0.5], [0, 0.5, 0], [0.5, 0, 1 / 3]], atol=1e-15)


MEASURES = {
    "legendre": lambda: make_measure(RealInterval(-1, 1), 0.3),
    "power_endpoint": lambda: make_measure(RealInterval(0, 1), 0, alpha=0.7),
    "two_intervals": lambda: make_measure([RealInterval(-1, -0.25), RealInterval(0.25, 1)], 0.6),
    "circle_power": lambda: make_measure(UnitCircle(), 1j, alpha=1.0),
    "lemniscate": lambda: make_measure(Lemniscate(ComplexPolynomial((-0.5, 0, 1))), complex(np.sqrt(0.5 + 1j))),
}


@pytest.mark.parametrize("name", sorted(MEASURES))
def test_gram_hermitian_positive_definite(name):
    G = gram(MEASURES[name](), 24)
    n = len(G.entries)
    for j in range(n):
        for k in range(n):
            a, b = G.entries[j][k], G.entries[k][j]
            if isinstance(b, type(gmpy2.mpc(0))):
                assert a.real == b.real and a.imag + b.imag == 0
            else:
                assert a == b
    A = _as_float(G)
    # positive definiteness checked on the diagonally rescaled matrix
    d = 1 / np.sqrt(np.real(np.diag(A)))
    assert np.min(np.linalg.eigvalsh(d[:, None] * A * d[None, :])) > 0


@given(c=st.floats(0.01, 100.0))
def test_gram_linear_in_weight(c):
    m = make_measure(RealInterval(-1, 1), 0.2, alpha=0.5)
    G1 = _as_float(gram(m, 6))
    G2 = _as_float(gram(m.scaled(c), 6))
    assert np.allclose(G2, c * G1, rtol=1e-13, atol=1e-15)


def test_sqrt_pullback_examples():
    for alpha in (1.0, 2.0):
        m = make_measure(RealInterval(0, 1), 0, alpha=(alpha - 1) / 2)
        p = sqrt_pullback(m)
        assert p.components == (RealInterval(-1.0, 1.0),)
        assert p.alpha == alpha and p.z0 == 0 and p.location == "interior"
    p = sqrt_pullback(make_measure(RealInterval(0, 1), 0))
    assert p.alpha == 1.0
    m = make_measure(RealInterval(0, 1), 0, alpha=0.5)
    assert math.isclose(total_mass(sqrt_pullback(m)), 2 / 3, rel_tol=1e-12)
    assert math.isclose(total_mass(m), 2 / 3, rel_tol=1e-12)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_sqrt_pullback_preserves_mass(alpha):
    m = make_measure(RealInterval(0, 1), 0, alpha=alpha, w=lambda x: 1 + x)
    assert math.isclose(total_mass(sqrt_pullback(m)), total_mass(m), rel_tol=1e-10)


def test_sqrt_pullback_unsupported():
    with pytest.raises(UnsupportedGeometry):
        sqrt_pullback(make_measure([RealInterval(-1, 0), RealInterval(0.5, 1)], 0))
    with pytest.raises(UnsupportedGeometry):
        sqrt_pullback(make_measure(CircularArc(-1, 1.0, -1.0, 1.0), 0))
