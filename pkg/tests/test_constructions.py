import json
import math

import numpy as np
import pytest

from christoffel_asymptotics.bessel import kernel_Jcal
from christoffel_asymptotics.constructions import (
    ConstructionError,
    LocalReport,
    bessel_division,
    build_Cn,
    default_N,
    default_rho,
    default_tau,
    equal_mass_division,
    evaluate_Cn,
    make_scheme,
    verify_local_behavior,
)
from christoffel_asymptotics.equilibrium import density_circle, density_intervals
from christoffel_asymptotics.geometry import RealInterval, UnitCircle
from christoffel_asymptotics.measures import make_measure

SEG = density_intervals([-1, 1])
TWO = density_intervals([-1, -0.25, 0.25, 1])


def test_defaults():
    tau = default_tau(0.0)
    assert tau == 15.5 / 16.5 and (15 + 0) * (1 - tau) < tau
    assert default_N(1000, tau) == math.floor(1000 ** (3 / 16.5))
    assert math.isclose(default_rho(0.0, tau), 9 / 16.5, rel_tol=1e-15)


@pytest.mark.parametrize("n", [10, 40, 101])
def test_bessel_division_on_segment(n):
    a = bessel_division(SEG, 0, n, 0.5)
    assert a.k0 == a.k1
    for k, p in a.items():
        assert abs(p - math.sin(k * math.pi / n)) < 1e-12
        assert abs(a[-k] + p) < 1e-12
    assert a[0] == 0


def test_bessel_division_reaches_edge():
    n = 40
    a = bessel_division(SEG, 0, n, 0.5)
    assert abs(a[n // 2] - 1) < 1e-12


def test_bessel_division_two_intervals():
    eq = density_intervals([-1, -0.4, 0.4, 1])
    a = bessel_division(eq, 0.7, 50, 0.5)
    # j_{1/2,k} = k pi, so a_k carries signed mass k/n from z0
    for k, p in a.items():
        assert abs(eq.cumulative(0.7, p.real) - k / 50) < 1e-11


def test_equal_mass_on_segment():
    n = 60
    b, xi = equal_mass_division(SEG, 0, n)
    assert abs(b[1] - math.sin(math.pi / (2 * n))) < 1e-12
    assert abs(b[0] + b[1]) < 1e-12
    assert xi[0] == 0
    for k in xi.indices():
        lo, hi = b[k].real, b[k + 1].real
        mass = SEG.cumulative(lo, hi)
        if abs(mass - 1 / n) < 1e-9:
            ref = (n / math.pi) * (math.sqrt(1 - lo * lo) - math.sqrt(1 - hi * hi))
            assert abs(xi[k].real - ref) < 1e-10
    total = sum(SEG.cumulative(b[k].real, b[k + 1].real) for k in xi.indices())
    assert abs(total - 1) < 1e-10


def _check_division_invariants(eq, z0, n):
    b, xi = equal_mass_division(eq, z0, n)
    pts = [p.real for p in b]
    assert all(p < q for p, q in zip(pts, pts[1:]))
    masses = [eq.cumulative(b[k].real, b[k + 1].real) for k in xi.indices()]
    full = [m for m in masses if abs(m - 1 / n) < 1e-9]
    assert len(full) >= len(masses) - 4
    assert all(m <= 1 / n + 1e-9 for m in masses)
    for k in xi.indices():
        lo, hi = b[k].real, b[k + 1].real
        assert lo - 1e-12 <= xi[k].real <= hi + 1e-12
    a = bessel_division(eq, z0, n, 0.5)
    for k, p in a.items():
        if k:
            assert abs(eq.cumulative(z0, p.real) - k / n) < 1e-10
    return masses


@pytest.mark.parametrize("n", [100, 500])
def test_division_invariants_segment(n):
    masses = _check_division_invariants(SEG, 0.0, n)
    assert abs(sum(masses) - 1) < 1e-10


@pytest.mark.parametrize("n", [100, 500])
def test_division_invariants_two_intervals(n):
    masses = _check_division_invariants(TWO, 0.6, n)
    # the cells cover the component of z0
    assert abs(sum(masses) - 0.5) < 1e-10


def test_circle_division_covers_circle():
    eq = density_circle()
    b, xi = equal_mass_division(eq, 1j, 50)
    total = sum(eq.cumulative(b[k], b[k + 1]) % 1.0 for k in xi.indices())
    assert abs(total - 1) < 1e-10


def _direct(scheme, z):
    a, xi = scheme.roots()
    r = np.array(a + xi)
    return complex(np.prod((z - r) / (scheme.z0 - r)))


@pytest.mark.parametrize("n", [50, 200])
def test_Cn_exact_at_base_point_and_matches_direct_product(n):
    s = make_scheme(SEG, 0.0, n)
    assert build_Cn(s, s.z0) == (1, 1, 1)
    assert s.degree == n
    for z in (0.001, 0.013, -0.2, 0.5, 0.93, 0.3 + 0.01j):
        C = build_Cn(s, z)[2]
        ref = _direct(s, z)
        assert abs(abs(C) - abs(ref)) <= 1e-9 * abs(ref)


def test_Cn_vanishes_at_a1():
    s = make_scheme(SEG, 0.0, 200)
    A, _, C = build_Cn(s, s.a_points[1])
    assert A == 0 and C == 0


def test_A_close_to_kernel():
    n = 500
    s = make_scheme(SEG, 0.0, n)
    z = 0.5 / (n * math.pi * s.omega0)
    A = build_Cn(s, z)[0]
    dev = abs(A - kernel_Jcal(0.5, n * math.pi * s.omega0 * z))
    # only the first N_n zeros enter, so this is a measured deviation, not a rate
    assert math.isfinite(dev) and dev < 0.1


def test_circle_scheme_exact_at_base_point():
    s = make_scheme(density_circle(), 1j, 64)
    assert build_Cn(s, 1j) == (1, 1, 1)
    A, B, C = evaluate_Cn(s, np.array([1j, np.exp(1j * 1.5)]))
    assert C[0] == 1 and np.all(np.isfinite(C))


def test_nonconforming_override():
    s = make_scheme(SEG, 0.0, 200, tau=0.5)
    assert not s.conforming
    s = make_scheme(SEG, 0.0, 200, N_n=6)
    assert not s.conforming and s.N_n == 6


def test_local_report_serialization():
    m = make_measure(RealInterval(-1, 1), 0)
    rep = verify_local_behavior(None, m, n_list=[200], samples=401, sup_samples=5)
    assert isinstance(rep, LocalReport)
    d = json.loads(rep.to_json())
    row = d["rows"][0]
    for key in ("n", "N_n", "tau", "rho", "conforming", "degree", "b_window_dev", "sup_C", "scaled_integral", "limit"):
        assert key in row
    assert row["n"] == 200 and rep.column("n") == [200]
    assert math.isfinite(row["b_window_dev"]) and row["sup_C"] >= 1.0


def test_local_report_rejects_endpoint():
    with pytest.raises(ConstructionError):
        verify_local_behavior(None, make_measure(RealInterval(0, 1), 0), n_list=[50])


def test_equal_mass_rejects_point_near_end():
    with pytest.raises(ConstructionError):
        equal_mass_division(SEG, 0.99999, 10)
