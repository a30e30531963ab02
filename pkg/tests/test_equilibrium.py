import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from christoffel_asymptotics.equilibrium import (
    EquilibriumError,
    density_circle,
    density_for,
    density_intervals,
    density_lemniscate,
    endpoint_constant,
    gap_integrals,
    gap_roots,
    pushforward_residual,
    symmetrization_residual,
)
from christoffel_asymptotics.geometry import CircularArc, RealInterval
from christoffel_asymptotics.measures import make_measure
from christoffel_asymptotics.polynomials import ComplexPolynomial

LEM = ComplexPolynomial((-0.5, 0, 1))


def _two_interval_closed_form(x, a):
    return abs(x) / (math.pi * math.sqrt((x * x - a * a) * (1 - x * x)))


def test_gap_root_examples():
    assert gap_roots([-1, 1]) == []
    assert abs(gap_roots([-1, -0.3, 0.3, 1])[0]) < 1e-12
    (r,) = gap_roots([-1, 0, 0.5, 1])
    assert 0 < r < 0.5
    assert np.max(np.abs(gap_integrals([-1, 0, 0.5, 1], [r]))) < 1e-10


def test_gap_root_oracle_by_scipy():
    # the single gap integral, evaluated independently with scipy's algebraic weight
    ends = [-1, 0, 0.5, 1]
    (r,) = gap_roots(ends)

    def f(t):
        return (t - r) / math.sqrt(abs(t + 1) * abs(t - 1))

    val, _ = integrate.quad(f, 0, 0.5, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14)
    assert abs(val) < 1e-10


@given(st.lists(st.floats(-5, 5), min_size=6, max_size=6, unique=True))
def test_gap_root_system_vanishes(pts):
    ends = sorted(pts)
    if min(np.diff(ends)) < 1e-2:
        return
    roots = gap_roots(ends)
    assert all(ends[2 * j + 1] < roots[j] < ends[2 * j + 2] for j in range(2))
    scale = max(1.0, max(abs(x) for x in ends)) ** 2
    assert np.max(np.abs(gap_integrals(ends, roots))) < 1e-10 * scale


def test_density_examples():
    eq = density_intervals([-1, 1])
    assert math.isclose(float(eq.eval(0.0)), 1 / math.pi, rel_tol=1e-15)
    for x in (-0.9, -0.2, 0.4, 0.99):
        assert math.isclose(eq.cumulative(0.0, x), math.asin(x) / math.pi, rel_tol=1e-12, abs_tol=1e-15)
    eq2 = density_intervals([-1, -0.25, 0.25, 1])
    for x in (0.3, 0.5, 0.9, -0.6):
        assert math.isclose(float(eq2.eval(x)), _two_interval_closed_form(x, 0.25), rel_tol=1e-12)


@pytest.mark.parametrize("ends", [[-1, 1], [-1, -0.25, 0.25, 1], [-1, 0, 0.5, 1], [-2, -1, 0, 0.5, 2, 3]])
def test_mass_and_positivity(ends):
    eq = density_intervals(ends)
    assert abs(eq.mass() - 1) < 1e-9
    rng = np.random.default_rng(7)
    for a, b in eq.intervals:
        xs = rng.uniform(a, b, 1000)
        assert np.all(eq.eval(xs) > 0)
    total = sum(integrate.quad(lambda x: float(eq.eval(x)), a, b, limit=200)[0] for a, b in eq.intervals)
    assert abs(total - 1) < 1e-6


@given(a=st.floats(0.05, 0.9), x=st.floats(0.0, 1.0))
def test_symmetric_sets_give_even_density(a, x):
    eq = density_intervals([-1, -a, a, 1])
    if not a < x < 1:
        return
    assert abs(float(eq.eval(x)) - float(eq.eval(-x))) <= 1e-12 * max(1.0, float(eq.eval(x)))


def test_locate_mass_inverts_cumulative():
    eq = density_intervals([-1, -0.25, 0.25, 1])
    for m in (0.01, 0.1, 0.3, -0.05, -0.19):
        x = eq.locate_mass(0.6, m)
        assert abs(eq.cumulative(0.6, x) - m) < 1e-12
    # the walk stays on the component of the start point
    assert eq.locate_mass(0.6, 0.31) is None
    assert eq.locate_mass(0.6, -0.2) is None


def test_endpoint_constant_examples():
    assert math.isclose(endpoint_constant([-1, 1], 1), 1 / (math.pi * math.sqrt(2)), rel_tol=1e-14)
    assert math.isclose(endpoint_constant([0, 1], 0), 1 / math.pi, rel_tol=1e-14)
    a = 0.25
    M = endpoint_constant([-1, -a, a, 1], a)
    errs = [abs(math.sqrt(h) * _two_interval_closed_form(a + h, a) - M) for h in (1e-4, 1e-6)]
    assert errs[1] < errs[0] < 1e-2
    with pytest.raises(EquilibriumError):
        endpoint_constant([-1, 1], 0.5)


def test_circle_density():
    eq = density_circle()
    assert math.isclose(float(eq.eval(1j)), 1 / (2 * math.pi), rel_tol=1e-15)
    assert abs(eq.mass() - 1) < 1e-15
    assert abs(eq.cumulative(1, 1j) - 0.25) < 1e-15


def test_lemniscate_examples():
    for N in (1, 2, 3):
        eq = density_lemniscate(ComplexPolynomial((0,) * N + (1,)))
        for t in np.linspace(0, 6, 7):
            assert math.isclose(float(eq.eval(np.exp(1j * t))), 1 / (2 * math.pi), rel_tol=1e-14)
    eq = density_lemniscate(LEM)
    z0 = complex(np.sqrt(0.5 + 1j))
    assert math.isclose(float(eq.eval(z0)), abs(2 * z0) / (4 * math.pi), rel_tol=1e-15)
    assert abs(eq.mass() - 1) < 1e-9


@pytest.mark.parametrize("deg", range(0, 5))
def test_pushforward_trigonometric(deg):
    for g in (lambda w: w**deg, lambda w: np.conj(w) ** deg + 0.5 * w):
        assert pushforward_residual(LEM, g) < 1e-9


@pytest.mark.parametrize("coeffs", [(1,), (0, 1), (0.3, -1, 2), (1j, 0.5, 0, -2)])
def test_symmetrization_polynomial(coeffs):
    P = ComplexPolynomial(coeffs)
    assert symmetrization_residual(LEM, lambda z: P(z)) < 1e-8


def test_density_for_dispatch():
    m = make_measure([RealInterval(-1, -0.25), RealInterval(0.25, 1)], 0.6)
    assert density_for(m).endpoints == (-1.0, -0.25, 0.25, 1.0)
    with pytest.raises(EquilibriumError):
        density_for(make_measure(CircularArc(0j, 1.0, 0.0, 1.0), 1.0))
